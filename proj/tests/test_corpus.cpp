#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "xliso/corpus.hpp"
#include "xliso/matrix.hpp"

using namespace xliso;

TEST_CASE("tokenize splits on whitespace and punctuation, lowercased") {
  CHECK(tokenize_line("The cat sat.") ==
        std::vector<std::string>{"the", "cat", "sat"});
  CHECK(tokenize_line("").empty());
  CHECK(tokenize_line("a  b") == std::vector<std::string>{"a", "b"});
  CHECK(tokenize_line("don't-know") ==
        std::vector<std::string>{"don", "t", "know"});
}

TEST_CASE("tokenize passes non-Latin scripts through unmodified") {
  const std::string arabic = "\xd9\x83\xd8\xaa\xd8\xa7\xd8\xa8";  // one word
  const auto toks = tokenize_line("X " + arabic + " Y.");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0] == "x");
  CHECK(toks[1] == arabic);
  CHECK(toks[2] == "y");
}

TEST_CASE("tokenize reports invalid UTF-8 with the byte offset") {
  try {
    tokenize_line(std::string("ab\xff") + "cd");
    FAIL("expected decode error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("byte offset 2") != std::string::npos);
  }
}

TEST_CASE("build_vocab filters, orders by frequency then lexicographically") {
  std::unordered_map<std::string, std::int64_t> counts{{"a", 5}, {"b", 1}};
  const Vocab v = build_vocab(counts, 2);
  REQUIRE(v.size() == 1);
  CHECK(v.words[0] == "a");

  const Vocab ties = build_vocab({{"b", 3}, {"a", 3}}, 1);
  CHECK(ties.lookup("a") == 0);
  CHECK(ties.lookup("b") == 1);

  CHECK_THROWS(build_vocab({{"x", std::int64_t(2)}}, 3));
}

TEST_CASE("build_vocab is a pure function of the token multiset") {
  std::vector<std::vector<std::string>> a{{"x", "y"}, {"y", "z", "z"}};
  std::vector<std::vector<std::string>> b{{"z", "z", "y"}, {"y", "x"}};
  const Vocab va = build_vocab(a, 1);
  const Vocab vb = build_vocab(b, 1);
  CHECK(va.words == vb.words);
  CHECK(va.counts == vb.counts);
}

TEST_CASE("noise distribution follows the count^power rule") {
  const Vocab sym = build_vocab({{"a", 1}, {"b", 1}}, 1);
  const NoiseDistribution nd_sym = noise_distribution(sym, 0.75);
  CHECK(nd_sym.probabilities[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(nd_sym.probabilities[1] == doctest::Approx(0.5).epsilon(1e-12));

  const Vocab skew = build_vocab({{"a", 4}, {"b", 1}}, 1);
  const NoiseDistribution nd = noise_distribution(skew, 0.75);
  const double expect_a = std::pow(4.0, 0.75) / (std::pow(4.0, 0.75) + 1.0);
  CHECK(nd.probabilities[skew.lookup("a")] ==
        doctest::Approx(expect_a).epsilon(1e-12));
  CHECK(nd.probabilities[skew.lookup("b")] ==
        doctest::Approx(1.0 - expect_a).epsilon(1e-12));

  const Vocab single = build_vocab({{"a", 7}}, 1);
  CHECK(noise_distribution(single, 0.42).probabilities[0] == 1.0);
}

TEST_CASE("noise distribution sums to one for any vocabulary") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::unordered_map<std::string, std::int64_t> counts;
    const int n = 1 + static_cast<int>(rng.uniform_index(3000));
    for (int i = 0; i < n; ++i)
      counts["w" + std::to_string(i)] =
          1 + static_cast<std::int64_t>(rng.uniform_index(100000));
    const NoiseDistribution nd = noise_distribution(build_vocab(counts, 1), 0.75);
    CHECK(std::abs(kahan_sum(nd.probabilities) - 1.0) < 1e-12);
    for (double p : nd.probabilities) CHECK(p > 0.0);
  }
}

TEST_CASE("noise sampling hits words proportionally") {
  const Vocab v = build_vocab({{"a", 90}, {"b", 10}}, 1);
  const NoiseDistribution nd = noise_distribution(v, 1.0);
  Rng rng(3);
  int hits_a = 0;
  for (int i = 0; i < 10000; ++i)
    if (nd.sample(rng) == v.lookup("a")) ++hits_a;
  CHECK(hits_a > 8500);
  CHECK(hits_a < 9500);
}

TEST_CASE("context pairs: spec examples") {
  {
    Rng rng(1);
    const auto pairs = context_pairs_vec({{0, 1}}, 1, false, rng);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0] == ContextPair{0, 1});
    CHECK(pairs[1] == ContextPair{1, 0});
  }
  {
    Rng rng(1);
    CHECK(context_pairs_vec({{5}}, 4, true, rng).empty());
  }
  // [a, b, c] with fixed window 2: brute-force enumeration over |i-j| <= 2.
  {
    Rng rng(1);
    const auto pairs = context_pairs_vec({{0, 1, 2}}, 2, false, rng);
    std::vector<ContextPair> expect;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j && std::abs(i - j) <= 2) expect.push_back({i, j});
    CHECK(pairs == expect);
    CHECK(pairs.size() == 6);
  }
}

TEST_CASE("context pairs reproduce bit-for-bit under a fixed seed") {
  std::vector<std::vector<int>> sentences{{0, 1, 2, 3, 4, 5}, {2, 2, 1}, {}};
  Rng r1(99), r2(99);
  CHECK(context_pairs_vec(sentences, 5, true, r1) ==
        context_pairs_vec(sentences, 5, true, r2));
}

TEST_CASE("sharded pair generation is reproducible per shard") {
  std::vector<std::vector<int>> sentences;
  Rng gen(5);
  for (int s = 0; s < 17; ++s) {
    std::vector<int> sent;
    for (int t = 0; t < 6; ++t) sent.push_back(static_cast<int>(gen.uniform_index(30)));
    sentences.push_back(sent);
  }
  std::vector<std::vector<ContextPair>> first(3), second(3);
  context_pairs_sharded(sentences, 4, true, 42, 3,
                        [&](int s, ContextPair p) { first[s].push_back(p); });
  context_pairs_sharded(sentences, 4, true, 42, 3,
                        [&](int s, ContextPair p) { second[s].push_back(p); });
  for (int s = 0; s < 3; ++s) CHECK(first[s] == second[s]);
}

TEST_CASE("subsampling disabled keeps every token") {
  const Vocab v = build_vocab({{"a", 100}, {"b", 1}}, 1);
  Rng rng(1);
  std::vector<int> out;
  subsample_sentence({0, 1, 0, 0}, v, 0.0, rng, out);
  CHECK(out == std::vector<int>{0, 1, 0, 0});
}

TEST_CASE("subsampling keeps rare words and thins frequent ones") {
  std::unordered_map<std::string, std::int64_t> counts{{"top", 100000},
                                                       {"rare", 5}};
  const Vocab v = build_vocab(counts, 1);
  const int top = v.lookup("top"), rare = v.lookup("rare");
  Rng rng(11);
  int kept_top = 0, kept_rare = 0;
  std::vector<int> out;
  for (int i = 0; i < 2000; ++i) {
    subsample_sentence({top, rare}, v, 1e-4, rng, out);
    for (int id : out) (id == top ? kept_top : kept_rare)++;
  }
  CHECK(kept_rare == 2000);  // keep probability >= 1 for rare words
  CHECK(kept_top < 1200);
}

TEST_CASE("corpus loading maps tokens to ids and drops OOV") {
  std::vector<std::vector<std::string>> sentences{
      {"a", "a", "a", "b", "b"}, {"a", "rare", "b"}};
  const Corpus c = corpus_from_sentences(sentences, 2);
  CHECK(c.vocab.lookup("rare") == -1);
  REQUIRE(c.sentences.size() == 2);
  CHECK(c.sentences[1] ==
        std::vector<int>{c.vocab.lookup("a"), c.vocab.lookup("b")});
}

TEST_CASE("vocab export writes word<TAB>count in id order") {
  const Vocab v = build_vocab({{"b", 3}, {"a", 5}}, 1);
  const auto path = std::filesystem::temp_directory_path() / "xliso_vocab_test.tsv";
  save_vocab(v, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "a\t5");
  std::getline(in, line);
  CHECK(line == "b\t3");
  std::filesystem::remove(path);
}
