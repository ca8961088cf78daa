#include "xliso/semantic_graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace xliso {

std::span<const SeedPair> SeedLexicon::slice(const IndexRange& r) const {
  const std::size_t b = std::min(r.begin, pairs.size());
  const std::size_t e = std::min(r.end, pairs.size());
  if (e <= b) return {};
  return {pairs.data() + b, e - b};
}

SeedLexicon load_seed_lexicon(const std::filesystem::path& path,
                              const SplitRanges& splits) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("load_seed_lexicon: cannot open " + path.string());

  SeedLexicon lex;
  lex.splits = splits;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string src, tgt, extra;
    if (!(ls >> src)) continue;  // blank line
    if (!(ls >> tgt))
      throw std::runtime_error("load_seed_lexicon: single token at line " +
                               std::to_string(lineno) + " of " + path.string());
    if (ls >> extra) {
      ++lex.rejected_multi_token;
      continue;
    }
    lex.pairs.push_back(SeedPair{std::move(src), std::move(tgt)});
  }
  return lex;
}

std::size_t SemanticGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& nbrs : adjacency) twice += nbrs.size();
  return twice / 2;
}

SemanticGraph build_graph(const std::vector<std::string>& target_seeds,
                          const EmbeddingMatrix& pretrained, double eta) {
  if (eta < 0.0 || eta >= 1.0)
    throw std::invalid_argument("build_graph: eta must be in [0, 1)");

  SemanticGraph g;
  g.eta = eta;
  g.words = target_seeds;
  g.adjacency.assign(g.words.size(), {});

  std::vector<int> emb_row(g.words.size(), -1);
  for (std::size_t i = 0; i < g.words.size(); ++i) {
    emb_row[i] = pretrained.lookup(g.words[i]);
    if (emb_row[i] < 0) ++g.missing_words;
  }

  for (std::size_t i = 0; i < g.words.size(); ++i) {
    if (emb_row[i] < 0) continue;
    const auto vi = pretrained.vectors.row(static_cast<std::size_t>(emb_row[i]));
    for (std::size_t j = i + 1; j < g.words.size(); ++j) {
      if (emb_row[j] < 0) continue;
      const auto vj = pretrained.vectors.row(static_cast<std::size_t>(emb_row[j]));
      if (cosine(vi, vj) > eta) {
        g.adjacency[i].push_back(static_cast<int>(j));
        g.adjacency[j].push_back(static_cast<int>(i));
      }
    }
  }
  for (auto& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

std::vector<int> attention_neighborhood(const SemanticGraph& g, int i) {
  if (i < 0 || static_cast<std::size_t>(i) >= g.node_count())
    throw std::out_of_range("attention_neighborhood: node id out of range");
  std::vector<int> nbh;
  nbh.reserve(g.adjacency[static_cast<std::size_t>(i)].size() + 1);
  nbh.push_back(i);
  for (int j : g.adjacency[static_cast<std::size_t>(i)]) nbh.push_back(j);
  return nbh;
}

void save_edge_list(const SemanticGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("save_edge_list: cannot open " + path.string());
  for (std::size_t i = 0; i < g.adjacency.size(); ++i)
    for (int j : g.adjacency[i])
      if (static_cast<std::size_t>(j) > i) out << i << '\t' << j << '\n';
  if (!out)
    throw std::runtime_error("save_edge_list: write failed for " + path.string());
}

std::vector<std::string> unique_targets(std::span<const SeedPair> pairs) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& p : pairs)
    if (seen.insert(p.target).second) out.push_back(p.target);
  return out;
}

}  // namespace xliso
