#include "support/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "xliso/rng.hpp"

namespace xliso::testing {

namespace {

std::vector<std::vector<std::string>> split_lines(
    const std::vector<std::string>& lines) {
  std::vector<std::vector<std::string>> out;
  out.reserve(lines.size());
  for (const auto& line : lines) {
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    out.push_back(std::move(toks));
  }
  return out;
}

class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double exponent) : cumulative_(n) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      acc += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
      cumulative_[r] = acc;
    }
    for (double& c : cumulative_) c /= acc;
  }

  std::size_t sample(Rng& rng) const {
    const double u = rng.uniform01();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace

SyntheticBili make_synthetic_bili(std::uint64_t seed, std::size_t vocab_size,
                                  std::size_t token_budget, int n_train,
                                  int n_test) {
  Rng rng = Rng::derive(seed, 0xB111);
  const ZipfSampler zipf(vocab_size, 1.0);

  // Per-word successor sets give the corpus bigram structure; semantically
  // "related" words are the ones sharing successors.
  constexpr std::size_t kSuccessors = 4;
  constexpr double kFollowProb = 0.55;
  std::vector<std::vector<std::size_t>> successors(vocab_size);
  for (auto& set : successors) {
    set.resize(kSuccessors);
    for (auto& s : set) s = zipf.sample(rng);
  }

  // Source surface forms are a shuffled relabeling of the target ids.
  std::vector<std::size_t> bijection(vocab_size);
  std::iota(bijection.begin(), bijection.end(), 0);
  for (std::size_t i = vocab_size - 1; i > 0; --i) {
    const std::size_t j = rng.uniform_index(i + 1);
    std::swap(bijection[i], bijection[j]);
  }
  const auto target_word = [](std::size_t id) { return "t" + std::to_string(id); };
  const auto source_word = [&](std::size_t id) {
    return "s" + std::to_string(bijection[id]);
  };

  SyntheticBili world;
  std::vector<std::int64_t> counts(vocab_size, 0);
  std::size_t tokens = 0;
  while (tokens < token_budget) {
    const std::size_t len = 8 + rng.uniform_index(13);  // 8..20
    std::string tgt_line, src_line;
    std::size_t prev = zipf.sample(rng);
    for (std::size_t p = 0; p < len; ++p) {
      const std::size_t id =
          (p > 0 && rng.uniform01() < kFollowProb)
              ? successors[prev][rng.uniform_index(kSuccessors)]
              : zipf.sample(rng);
      if (p) {
        tgt_line += ' ';
        src_line += ' ';
      }
      tgt_line += target_word(id);
      src_line += source_word(id);
      ++counts[id];
      prev = id;
    }
    world.target_lines.push_back(std::move(tgt_line));
    world.source_lines.push_back(std::move(src_line));
    tokens += len;
  }

  // Dictionary over the most frequent words so every entry survives the
  // vocabulary cut; shuffled so train and test share a frequency profile.
  std::vector<std::size_t> by_freq(vocab_size);
  std::iota(by_freq.begin(), by_freq.end(), 0);
  std::stable_sort(by_freq.begin(), by_freq.end(), [&](std::size_t a, std::size_t b) {
    return counts[a] > counts[b];
  });
  const std::size_t need = static_cast<std::size_t>(n_train + n_test);
  if (need > vocab_size)
    throw std::invalid_argument("make_synthetic_bili: dictionary larger than vocab");
  std::vector<std::size_t> picked(by_freq.begin(), by_freq.begin() + need);
  for (std::size_t i = picked.size() - 1; i > 0; --i) {
    const std::size_t j = rng.uniform_index(i + 1);
    std::swap(picked[i], picked[j]);
  }
  for (std::size_t i = 0; i < need; ++i) {
    SeedPair pair{source_word(picked[i]), target_word(picked[i])};
    if (i < static_cast<std::size_t>(n_train)) {
      world.train_pairs.push_back(std::move(pair));
    } else {
      world.test_pairs.push_back(std::move(pair));
    }
  }
  return world;
}

std::vector<SeedPair> SyntheticBili::all_pairs() const {
  std::vector<SeedPair> all = train_pairs;
  all.insert(all.end(), test_pairs.begin(), test_pairs.end());
  return all;
}

SplitRanges SyntheticBili::splits() const {
  SplitRanges s;
  s.train = {0, train_pairs.size()};
  s.test = {train_pairs.size(), train_pairs.size() + test_pairs.size()};
  s.dev = {train_pairs.size(), train_pairs.size() + test_pairs.size()};
  return s;
}

SeedLexicon SyntheticBili::lexicon() const {
  SeedLexicon lex;
  lex.pairs = all_pairs();
  lex.splits = splits();
  return lex;
}

Corpus SyntheticBili::target_corpus(int min_count) const {
  return corpus_from_sentences(split_lines(target_lines), min_count);
}

Corpus SyntheticBili::source_corpus(int min_count) const {
  return corpus_from_sentences(split_lines(source_lines), min_count);
}

void write_lines(const std::filesystem::path& path,
                 const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_lines: cannot open " + path.string());
  for (const auto& line : lines) out << line << '\n';
}

void write_dictionary(const std::filesystem::path& path,
                      const SyntheticBili& world) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_dictionary: cannot open " + path.string());
  for (const auto& p : world.all_pairs()) out << p.source << ' ' << p.target << '\n';
}

}  // namespace xliso::testing
