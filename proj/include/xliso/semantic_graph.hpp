#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "xliso/embedding.hpp"

namespace xliso {

struct SeedPair {
  std::string source;
  std::string target;
  friend bool operator==(const SeedPair&, const SeedPair&) = default;
};

// Half-open [begin, end) slice of the kept seed pairs, in file order.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end > begin ? end - begin : 0; }
};

struct SplitRanges {
  IndexRange train;
  IndexRange dev;
  IndexRange test;
};

struct SeedLexicon {
  std::vector<SeedPair> pairs;  // file order
  SplitRanges splits;
  int rejected_multi_token = 0;  // 3+ token lines skipped at load

  std::span<const SeedPair> slice(const IndexRange& r) const;
  std::span<const SeedPair> train() const { return slice(splits.train); }
  std::span<const SeedPair> dev() const { return slice(splits.dev); }
  std::span<const SeedPair> test() const { return slice(splits.test); }
};

// One "source_word target_word" pair per line, whitespace-separated. Blank
// lines are skipped; one-token lines are a parse error; lines with more than
// two tokens (multi-token entries) are skipped and counted. Ranges index the
// kept pairs. Duplicate pairs are kept.
SeedLexicon load_seed_lexicon(const std::filesystem::path& path,
                              const SplitRanges& splits);

// Undirected semantic-relatedness graph over seed target words: edge (i,j)
// iff both words have pretrained vectors and their cosine exceeds eta.
struct SemanticGraph {
  std::vector<std::string> words;           // node id -> target word
  std::vector<std::vector<int>> adjacency;  // sorted neighbor lists, no self
  double eta = 0.0;
  int missing_words = 0;  // nodes without a pretrained vector (isolated)

  std::size_t node_count() const { return words.size(); }
  std::size_t edge_count() const;
};

SemanticGraph build_graph(const std::vector<std::string>& target_seeds,
                          const EmbeddingMatrix& pretrained, double eta);

// [i] followed by the sorted graph neighbors of i. The self entry keeps the
// attention softmax defined for isolated nodes.
std::vector<int> attention_neighborhood(const SemanticGraph& g, int i);

// One "i<TAB>j" line per undirected edge, i < j.
void save_edge_list(const SemanticGraph& g, const std::filesystem::path& path);

// Unique target words of the given pairs, in order of first appearance.
std::vector<std::string> unique_targets(std::span<const SeedPair> pairs);

}  // namespace xliso
