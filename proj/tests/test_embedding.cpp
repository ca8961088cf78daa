#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "xliso/embedding.hpp"
#include "xliso/rng.hpp"
#include "support/oracles.hpp"

using namespace xliso;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("load_word2vec_text parses a minimal file") {
  const auto p = temp_file("xliso_minimal.vec");
  write_text(p, "1 2\nfoo 0.5 -1.0\n");
  const EmbeddingMatrix e = load_word2vec_text(p);
  REQUIRE(e.size() == 1);
  REQUIRE(e.dim() == 2);
  CHECK(e.words[0] == "foo");
  CHECK(e.vectors(0, 0) == 0.5);
  CHECK(e.vectors(0, 1) == -1.0);
  fs::remove(p);
}

TEST_CASE("format errors carry the offending line") {
  const auto p = temp_file("xliso_bad.vec");

  write_text(p, "2 3\nfoo 1 2 3\n");
  CHECK_THROWS_WITH_AS(load_word2vec_text(p),
                       doctest::Contains("header declares 2"),
                       std::runtime_error);

  write_text(p, "2 2\nfoo 1 2\nfoo 3 4\n");
  CHECK_THROWS_WITH_AS(load_word2vec_text(p), doctest::Contains("duplicate"),
                       std::runtime_error);

  write_text(p, "1 2\nfoo 1 nan\n");
  CHECK_THROWS_WITH_AS(load_word2vec_text(p), doctest::Contains("non-finite"),
                       std::runtime_error);

  write_text(p, "1 2\nfoo 1\n");
  CHECK_THROWS(load_word2vec_text(p));
  fs::remove(p);
}

TEST_CASE("save then load round-trips words and values") {
  Rng rng(21);
  EmbeddingMatrix e =
      make_embedding({"alpha", "beta", "gamma"},
                     xliso::testing::random_matrix(3, 5, rng, 2.0));
  const auto p = temp_file("xliso_roundtrip.vec");
  save_word2vec_text(e, p);
  const EmbeddingMatrix back = load_word2vec_text(p);
  REQUIRE(back.words == e.words);
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = 0; j < e.dim(); ++j)
      CHECK(back.vectors(i, j) ==
            doctest::Approx(e.vectors(i, j)).epsilon(1e-6));
  fs::remove(p);
}

TEST_CASE("saving an empty matrix is refused") {
  EmbeddingMatrix empty;
  CHECK_THROWS(save_word2vec_text(empty, temp_file("xliso_empty.vec")));
}

TEST_CASE("cosine: spec examples and errors") {
  const std::vector<double> u{1.0, 2.0};
  CHECK(cosine(u, u) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
  CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{-1, 0}) == -1.0);
  CHECK_THROWS(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 0}));
}

TEST_CASE("cosine is symmetric and scale-invariant") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> u(4), v(4);
    for (auto& x : u) x = rng.gaussian();
    for (auto& x : v) x = rng.gaussian();
    const double a = 0.01 + 10.0 * rng.uniform01();
    const double b = 0.01 + 10.0 * rng.uniform01();
    std::vector<double> au(4), bv(4);
    for (int i = 0; i < 4; ++i) {
      au[i] = a * u[i];
      bv[i] = b * v[i];
    }
    CHECK(std::abs(cosine(u, v) - cosine(v, u)) < 1e-12);
    CHECK(std::abs(cosine(au, bv) - cosine(u, v)) < 1e-12);
  }
}

TEST_CASE("round-trip preserves argmax-by-cosine neighbor lists") {
  Rng rng(31);
  EmbeddingMatrix e;
  {
    std::vector<std::string> words;
    for (int i = 0; i < 20; ++i) words.push_back("w" + std::to_string(i));
    e = make_embedding(std::move(words),
                       xliso::testing::random_matrix(20, 6, rng));
  }
  const auto nearest = [](const EmbeddingMatrix& m, std::size_t q) {
    int best = -1;
    double score = -2.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == q) continue;
      const double c = cosine(m.vectors.row(q), m.vectors.row(i));
      if (c > score) {
        score = c;
        best = static_cast<int>(i);
      }
    }
    return best;
  };
  const auto p = temp_file("xliso_nn.vec");
  save_word2vec_text(e, p);
  const EmbeddingMatrix back = load_word2vec_text(p);
  for (std::size_t q = 0; q < e.size(); ++q)
    CHECK(nearest(e, q) == nearest(back, q));
  fs::remove(p);
}
