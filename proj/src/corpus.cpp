#include "xliso/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "xliso/matrix.hpp"

namespace xliso {

namespace {

bool is_ascii_delim(unsigned char c) {
  return std::isspace(c) || std::ispunct(c);
}

// Returns the length of the UTF-8 sequence starting at `i`, or 0 if invalid.
std::size_t utf8_seq_len(std::string_view s, std::size_t i) {
  const unsigned char b = static_cast<unsigned char>(s[i]);
  std::size_t len = 0;
  if (b < 0x80) return 1;
  if ((b & 0xE0) == 0xC0) len = 2;
  else if ((b & 0xF0) == 0xE0) len = 3;
  else if ((b & 0xF8) == 0xF0) len = 4;
  else return 0;
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k)
    if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return 0;
  return len;
}

}  // namespace

std::vector<std::string> tokenize_line(std::string_view line) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < line.size()) {
    const unsigned char b = static_cast<unsigned char>(line[i]);
    if (b < 0x80) {
      if (is_ascii_delim(b)) {
        if (!current.empty()) {
          tokens.push_back(std::move(current));
          current.clear();
        }
      } else {
        current.push_back(static_cast<char>(std::tolower(b)));
      }
      ++i;
    } else {
      const std::size_t len = utf8_seq_len(line, i);
      if (len == 0)
        throw std::runtime_error("tokenize: invalid UTF-8 at byte offset " +
                                 std::to_string(i));
      current.append(line.substr(i, len));
      i += len;
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

void tokenize_lines(std::istream& in,
                    const std::function<void(std::vector<std::string>&&)>& sink) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    sink(tokenize_line(line));
  }
}

std::int64_t Vocab::total_count() const {
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

Vocab build_vocab(const std::unordered_map<std::string, std::int64_t>& counts,
                  int min_count) {
  if (min_count < 1) throw std::invalid_argument("build_vocab: min_count < 1");
  std::vector<std::pair<std::string, std::int64_t>> kept;
  kept.reserve(counts.size());
  for (const auto& [word, count] : counts)
    if (count >= min_count) kept.emplace_back(word, count);
  if (kept.empty())
    throw std::runtime_error("build_vocab: empty vocabulary after min_count filter");

  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocab v;
  v.words.reserve(kept.size());
  v.counts.reserve(kept.size());
  v.index.reserve(kept.size());
  for (auto& [word, count] : kept) {
    v.index.emplace(word, static_cast<int>(v.words.size()));
    v.words.push_back(std::move(word));
    v.counts.push_back(count);
  }
  return v;
}

Vocab build_vocab(const std::vector<std::vector<std::string>>& sentences,
                  int min_count) {
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& sent : sentences)
    for (const auto& tok : sent) ++counts[tok];
  return build_vocab(counts, min_count);
}

void save_vocab(const Vocab& v, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_vocab: cannot open " + path.string());
  for (std::size_t i = 0; i < v.size(); ++i)
    out << v.words[i] << '\t' << v.counts[i] << '\n';
  if (!out) throw std::runtime_error("save_vocab: write failed for " + path.string());
}

NoiseDistribution noise_distribution(const Vocab& v, double power) {
  if (power <= 0.0) throw std::invalid_argument("noise_distribution: power <= 0");
  NoiseDistribution nd;
  nd.probabilities.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    nd.probabilities[i] = std::pow(static_cast<double>(v.counts[i]), power);
  const double total = kahan_sum(nd.probabilities);
  for (double& p : nd.probabilities) p /= total;

  nd.cumulative.resize(v.size());
  double acc = 0.0;
  double carry = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double y = nd.probabilities[i] - carry;
    const double t = acc + y;
    carry = (t - acc) - y;
    acc = t;
    nd.cumulative[i] = acc;
  }
  nd.cumulative.back() = 1.0;
  return nd;
}

int NoiseDistribution::sample(Rng& rng) const {
  const double u = rng.uniform01();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<int>(it - cumulative.begin());
}

void context_pairs(const std::vector<std::vector<int>>& sentences, int window,
                   bool dynamic_window, Rng& rng,
                   const std::function<void(ContextPair)>& sink) {
  if (window < 1) throw std::invalid_argument("context_pairs: window < 1");
  for (const auto& sent : sentences) {
    const int n = static_cast<int>(sent.size());
    for (int i = 0; i < n; ++i) {
      const int w = dynamic_window
                        ? 1 + static_cast<int>(rng.uniform_index(
                                  static_cast<std::uint64_t>(window)))
                        : window;
      const int lo = std::max(0, i - w);
      const int hi = std::min(n - 1, i + w);
      for (int j = lo; j <= hi; ++j) {
        if (j == i) continue;
        sink(ContextPair{sent[i], sent[j]});
      }
    }
  }
}

std::vector<ContextPair> context_pairs_vec(
    const std::vector<std::vector<int>>& sentences, int window,
    bool dynamic_window, Rng& rng) {
  std::vector<ContextPair> out;
  context_pairs(sentences, window, dynamic_window, rng,
                [&](ContextPair p) { out.push_back(p); });
  return out;
}

void context_pairs_sharded(
    const std::vector<std::vector<int>>& sentences, int window,
    bool dynamic_window, std::uint64_t seed, int n_shards,
    const std::function<void(int shard, ContextPair)>& sink) {
  if (n_shards < 1) throw std::invalid_argument("context_pairs_sharded: n_shards < 1");
  for (int shard = 0; shard < n_shards; ++shard) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(shard));
    std::vector<std::vector<int>> slice;
    for (std::size_t s = static_cast<std::size_t>(shard); s < sentences.size();
         s += static_cast<std::size_t>(n_shards))
      slice.push_back(sentences[s]);
    context_pairs(slice, window, dynamic_window, rng,
                  [&](ContextPair p) { sink(shard, p); });
  }
}

void subsample_sentence(const std::vector<int>& sentence, const Vocab& vocab,
                        double threshold, Rng& rng, std::vector<int>& out) {
  out.clear();
  if (threshold <= 0.0) {
    out = sentence;
    return;
  }
  const double budget = threshold * static_cast<double>(vocab.total_count());
  for (int id : sentence) {
    const double f = static_cast<double>(vocab.counts[id]);
    const double keep = (std::sqrt(f / budget) + 1.0) * budget / f;
    if (keep >= 1.0 || keep > rng.uniform01()) out.push_back(id);
  }
}

Corpus corpus_from_sentences(const std::vector<std::vector<std::string>>& sentences,
                             int min_count) {
  Corpus c;
  c.vocab = build_vocab(sentences, min_count);
  c.sentences.reserve(sentences.size());
  for (const auto& sent : sentences) {
    std::vector<int> ids;
    ids.reserve(sent.size());
    for (const auto& tok : sent) {
      const int id = c.vocab.lookup(tok);
      if (id >= 0) ids.push_back(id);
    }
    c.sentences.push_back(std::move(ids));
  }
  return c;
}

Corpus load_corpus(const std::filesystem::path& path, int min_count) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_corpus: cannot open " + path.string());

  std::vector<std::vector<std::string>> sentences;
  tokenize_lines(in, [&](std::vector<std::string>&& toks) {
    sentences.push_back(std::move(toks));
  });
  return corpus_from_sentences(sentences, min_count);
}

}  // namespace xliso
