#include "xliso/embedding.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace xliso {

EmbeddingMatrix make_embedding(std::vector<std::string> words, Matrix vectors) {
  if (words.size() != vectors.rows())
    throw std::invalid_argument("make_embedding: word/row count mismatch");
  EmbeddingMatrix e;
  e.words = std::move(words);
  e.vectors = std::move(vectors);
  e.index.reserve(e.words.size());
  for (std::size_t i = 0; i < e.words.size(); ++i) {
    auto [it, inserted] = e.index.emplace(e.words[i], static_cast<int>(i));
    if (!inserted)
      throw std::runtime_error("make_embedding: duplicate word '" + e.words[i] + "'");
  }
  return e;
}

EmbeddingMatrix load_word2vec_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("load_word2vec_text: cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_word2vec_text: empty file " + path.string());

  std::size_t vocab_size = 0, dim = 0;
  {
    std::istringstream header(line);
    if (!(header >> vocab_size >> dim) || vocab_size == 0 || dim == 0)
      throw std::runtime_error("load_word2vec_text: bad header at line 1 of " +
                               path.string());
  }

  std::vector<std::string> words;
  words.reserve(vocab_size);
  Matrix vectors(vocab_size, dim);

  std::size_t row = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (row >= vocab_size)
      throw std::runtime_error("load_word2vec_text: more rows than header declares at line " +
                               std::to_string(lineno));
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word))
      throw std::runtime_error("load_word2vec_text: missing word at line " +
                               std::to_string(lineno));
    for (std::size_t j = 0; j < dim; ++j) {
      double v = 0.0;
      if (!(ls >> v))
        throw std::runtime_error("load_word2vec_text: expected " +
                                 std::to_string(dim) + " values at line " +
                                 std::to_string(lineno));
      if (!std::isfinite(v))
        throw std::runtime_error("load_word2vec_text: non-finite value at line " +
                                 std::to_string(lineno));
      vectors(row, j) = v;
    }
    std::string extra;
    if (ls >> extra)
      throw std::runtime_error("load_word2vec_text: trailing tokens at line " +
                               std::to_string(lineno));
    words.push_back(std::move(word));
    ++row;
  }
  if (row != vocab_size)
    throw std::runtime_error("load_word2vec_text: header declares " +
                             std::to_string(vocab_size) + " rows but file has " +
                             std::to_string(row));
  return make_embedding(std::move(words), std::move(vectors));
}

void save_word2vec_text(const EmbeddingMatrix& e,
                        const std::filesystem::path& path) {
  if (e.size() == 0)
    throw std::runtime_error("save_word2vec_text: refusing to write empty matrix");
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("save_word2vec_text: cannot open " + path.string());

  out << e.size() << ' ' << e.dim() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < e.size(); ++i) {
    out << e.words[i];
    for (std::size_t j = 0; j < e.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.9g", e.vectors(i, j));
      out << ' ' << buf;
    }
    out << '\n';
  }
  if (!out)
    throw std::runtime_error("save_word2vec_text: write failed for " + path.string());
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw std::invalid_argument("cosine: dimension mismatch");
  const double nu = norm2(u);
  const double nv = norm2(v);
  if (nu == 0.0 || nv == 0.0)
    throw std::invalid_argument("cosine: undefined for zero-norm input");
  return dot(u, v) / (nu * nv);
}

}  // namespace xliso
