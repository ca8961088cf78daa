#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xliso/matrix.hpp"

namespace xliso {

// Dense row-per-word vector table. Immutable after load; the trainer owns
// its own mutable copies.
struct EmbeddingMatrix {
  std::vector<std::string> words;
  std::unordered_map<std::string, int> index;
  Matrix vectors;

  std::size_t size() const { return words.size(); }
  std::size_t dim() const { return vectors.cols(); }
  int lookup(std::string_view w) const {
    auto it = index.find(std::string(w));
    return it == index.end() ? -1 : it->second;
  }
};

EmbeddingMatrix make_embedding(std::vector<std::string> words, Matrix vectors);

// word2vec text format: header "V d", then one "word v1 ... vd" line per
// word. Words may contain any non-whitespace UTF-8.
EmbeddingMatrix load_word2vec_text(const std::filesystem::path& path);
void save_word2vec_text(const EmbeddingMatrix& e,
                        const std::filesystem::path& path);

// u.v / (|u||v|). Throws on zero-norm input.
double cosine(std::span<const double> u, std::span<const double> v);

}  // namespace xliso
