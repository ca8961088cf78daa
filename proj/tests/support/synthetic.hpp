#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xliso/corpus.hpp"
#include "xliso/semantic_graph.hpp"

namespace xliso::testing {

// Two-language toy world: a Zipfian target corpus with bigram structure and
// a source corpus that is a token-for-token relabeling of it through a
// random bijection. The gold dictionary is exact by construction.
struct SyntheticBili {
  std::vector<std::string> target_lines;
  std::vector<std::string> source_lines;
  std::vector<SeedPair> train_pairs;
  std::vector<SeedPair> test_pairs;

  std::vector<SeedPair> all_pairs() const;  // train then test
  SplitRanges splits() const;               // matching all_pairs order
  SeedLexicon lexicon() const;

  Corpus target_corpus(int min_count = 5) const;
  Corpus source_corpus(int min_count = 5) const;
};

SyntheticBili make_synthetic_bili(std::uint64_t seed,
                                  std::size_t vocab_size = 1000,
                                  std::size_t token_budget = 100000,
                                  int n_train = 500, int n_test = 200);

void write_lines(const std::filesystem::path& path,
                 const std::vector<std::string>& lines);
void write_dictionary(const std::filesystem::path& path,
                      const SyntheticBili& world);

}  // namespace xliso::testing
