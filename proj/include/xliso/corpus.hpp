#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xliso/rng.hpp"

namespace xliso {

// Lowercased whitespace-and-punctuation-split tokens. Splitting is on ASCII
// whitespace/punctuation only, so non-Latin scripts pass through unmodified.
// Throws std::runtime_error with the byte offset on invalid UTF-8.
std::vector<std::string> tokenize_line(std::string_view line);

// Streams a file line by line through tokenize_line.
void tokenize_lines(std::istream& in,
                    const std::function<void(std::vector<std::string>&&)>& sink);

struct Vocab {
  std::vector<std::string> words;    // id order: count desc, lexicographic ties
  std::vector<std::int64_t> counts;  // parallel to words
  std::unordered_map<std::string, int> index;

  std::size_t size() const { return words.size(); }
  int lookup(std::string_view w) const {
    auto it = index.find(std::string(w));
    return it == index.end() ? -1 : it->second;
  }
  std::int64_t total_count() const;
};

Vocab build_vocab(const std::unordered_map<std::string, std::int64_t>& counts,
                  int min_count);
Vocab build_vocab(const std::vector<std::vector<std::string>>& sentences,
                  int min_count);

// One "word<TAB>count" line per word, id order.
void save_vocab(const Vocab& v, const std::filesystem::path& path);

struct NoiseDistribution {
  std::vector<double> probabilities;  // sums to 1
  std::vector<double> cumulative;     // cumulative[i] = sum_{j<=i} p_j

  int sample(Rng& rng) const;  // O(log V)
};

// probability(w) = counts(w)^power / sum counts^power
NoiseDistribution noise_distribution(const Vocab& v, double power);

struct ContextPair {
  int center;
  int context;
  friend bool operator==(const ContextPair&, const ContextPair&) = default;
};

// Emits (center, context) pairs per position. When dynamic_window is set the
// effective window at each position is drawn uniformly from 1..window
// (word2vec convention); otherwise it is exactly `window`. Sentence
// boundaries are never crossed.
void context_pairs(const std::vector<std::vector<int>>& sentences, int window,
                   bool dynamic_window, Rng& rng,
                   const std::function<void(ContextPair)>& sink);

std::vector<ContextPair> context_pairs_vec(
    const std::vector<std::vector<int>>& sentences, int window,
    bool dynamic_window, Rng& rng);

// Sharded variant: shard s processes sentences s, s+n_shards, ... with its
// own generator derived from (seed, s). Each shard is reproducible on its
// own; outputs are disjoint by sentence.
void context_pairs_sharded(
    const std::vector<std::vector<int>>& sentences, int window,
    bool dynamic_window, std::uint64_t seed, int n_shards,
    const std::function<void(int shard, ContextPair)>& sink);

// word2vec frequent-word downsampling: keeps a token occurrence with
// probability (sqrt(f/(t*T)) + 1) * (t*T)/f where f is the word count and T
// the corpus total. Appends kept ids to `out`.
void subsample_sentence(const std::vector<int>& sentence, const Vocab& vocab,
                        double threshold, Rng& rng, std::vector<int>& out);

struct Corpus {
  Vocab vocab;
  std::vector<std::vector<int>> sentences;  // in-vocab token ids, line order
};

Corpus corpus_from_sentences(const std::vector<std::vector<std::string>>& sentences,
                             int min_count);

// Tokenizes a one-sentence-per-line UTF-8 file, builds the vocabulary and
// maps tokens to ids (out-of-vocab tokens are dropped).
Corpus load_corpus(const std::filesystem::path& path, int min_count);

}  // namespace xliso
