#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xliso/corpus.hpp"
#include "xliso/embedding.hpp"
#include "xliso/isometry.hpp"
#include "xliso/mapping.hpp"
#include "xliso/semantic_graph.hpp"
#include "xliso/trainer.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace xliso;

IndexRange parse_range(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::runtime_error("range '" + spec + "' must look like begin:end");
  IndexRange r;
  r.begin = std::stoull(spec.substr(0, colon));
  r.end = std::stoull(spec.substr(colon + 1));
  if (r.end < r.begin)
    throw std::runtime_error("range '" + spec + "' has end < begin");
  return r;
}

struct SplitOpts {
  std::string train = "0:5000";
  std::string test = "5000:6500";
  std::string dev = "6500:8000";

  SplitRanges ranges() const {
    SplitRanges s;
    s.train = parse_range(train);
    s.test = parse_range(test);
    s.dev = parse_range(dev);
    return s;
  }
};

void add_split_options(CLI::App* cmd, SplitOpts& s) {
  cmd->add_option("--train-range", s.train,
                  "Seed pairs used for fitting, as begin:end (half-open)");
  cmd->add_option("--test-range", s.test, "Seed pairs scored by evaluate");
  cmd->add_option("--dev-range", s.dev, "Seed pairs scored by sweep");
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw std::runtime_error(what + " path is required");
  if (!fs::exists(path))
    throw std::runtime_error(what + " path does not exist: " + path);
}

void write_json(const json& doc, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

struct TrainOpts {
  std::string source_corpus;
  std::string target_corpus;
  std::string target_embeddings;  // frozen Y; freezes from corpus if empty
  std::string pretrained;         // graph vectors; defaults to Y
  std::string seeds;
  std::string out_dir = "run";
  SplitOpts splits;
  TrainConfig cfg;
  std::string iso_variant = "proc_src";
  std::string gat_activation = "identity";
  bool fixed_window = false;
  bool no_subsample = false;
};

void add_train_options(CLI::App* cmd, TrainOpts& o) {
  cmd->set_config("--config", "", "key=value configuration file");
  cmd->add_option("--source-corpus", o.source_corpus,
                  "UTF-8 source text, one sentence per line");
  cmd->add_option("--target-corpus", o.target_corpus,
                  "Target text; used to train the frozen target space when "
                  "--target-embeddings is not given");
  cmd->add_option("--target-embeddings", o.target_embeddings,
                  "Frozen target embeddings (word2vec text)");
  cmd->add_option("--pretrained", o.pretrained,
                  "Pretrained target vectors for graph construction and "
                  "proc_src init (default: the frozen target embeddings)");
  cmd->add_option("--seeds", o.seeds, "Seed dictionary: source target per line");
  cmd->add_option("--out", o.out_dir, "Output directory (owned by this run)");
  add_split_options(cmd, o.splits);

  cmd->add_option("--gamma", o.cfg.gamma, "Distributional-loss weight in [0,1]");
  cmd->add_option("--eta", o.cfg.eta, "Graph cosine threshold");
  cmd->add_option("--k-neg", o.cfg.k_neg, "Negative samples per pair");
  cmd->add_option("--lr", o.cfg.lr, "Adam learning rate");
  cmd->add_option("--dim", o.cfg.dim, "Embedding dimensionality");
  cmd->add_option("--epochs", o.cfg.epochs, "Training epochs");
  cmd->add_option("--batch-size", o.cfg.batch_size, "Pairs per optimizer step");
  cmd->add_option("--iso-interval", o.cfg.iso_interval,
                  "Batches between isomorphism steps");
  cmd->add_option("--iso-variant", o.iso_variant, "l2 | proc | proc_src");
  cmd->add_option("--seed", o.cfg.seed, "RNG seed; all randomness derives from it");
  cmd->add_option("--gat-activation", o.gat_activation, "identity | tanh");
  cmd->add_flag("--literal-eq5", o.cfg.literal_eq5,
                "Combine each node's own projected vector (fidelity variant)");
  cmd->add_flag("--squared-norm", o.cfg.squared_norm,
                "Use squared-Frobenius isomorphism losses");
  cmd->add_option("--window", o.cfg.window, "Context window");
  cmd->add_flag("--fixed-window", o.fixed_window,
                "Disable per-position window shrinking");
  cmd->add_option("--min-count", o.cfg.min_count, "Vocabulary frequency floor");
  cmd->add_option("--subsample", o.cfg.subsample,
                  "Frequent-word downsampling threshold");
  cmd->add_flag("--no-subsample", o.no_subsample,
                "Disable frequent-word downsampling");
  cmd->add_option("--noise-power", o.cfg.noise_power,
                  "Unigram exponent of the negative-sampling distribution");
  cmd->add_option("--threads", o.cfg.threads,
                  "SGNS worker threads (>1 is hogwild and nondeterministic)");
}

TrainConfig resolve_config(TrainOpts& o) {
  TrainConfig cfg = o.cfg;
  cfg.iso_variant = iso_variant_from_string(o.iso_variant);
  if (o.gat_activation == "identity") {
    cfg.gat_activation = GatActivation::identity;
  } else if (o.gat_activation == "tanh") {
    cfg.gat_activation = GatActivation::tanh;
  } else {
    throw std::runtime_error("unknown --gat-activation '" + o.gat_activation +
                             "'");
  }
  if (o.fixed_window) cfg.dynamic_window = false;
  if (o.no_subsample) cfg.subsample = 0.0;
  return cfg;
}

json epochs_to_json(const TrainReport& report) {
  json arr = json::array();
  for (const auto& e : report.epochs)
    arr.push_back({{"dis_loss", e.dis_loss},
                   {"iso_loss", e.iso_loss},
                   {"combined", e.combined}});
  return arr;
}

json config_to_json(const TrainConfig& cfg) {
  return {{"gamma", cfg.gamma},
          {"eta", cfg.eta},
          {"k_neg", cfg.k_neg},
          {"lr", cfg.lr},
          {"dim", cfg.dim},
          {"epochs", cfg.epochs},
          {"batch_size", cfg.batch_size},
          {"iso_interval", cfg.iso_interval},
          {"iso_variant", to_string(cfg.iso_variant)},
          {"seed", cfg.seed},
          {"gat_activation",
           cfg.gat_activation == GatActivation::identity ? "identity" : "tanh"},
          {"literal_eq5", cfg.literal_eq5},
          {"squared_norm", cfg.squared_norm},
          {"window", cfg.window},
          {"dynamic_window", cfg.dynamic_window},
          {"min_count", cfg.min_count},
          {"subsample", cfg.subsample},
          {"noise_power", cfg.noise_power},
          {"threads", cfg.threads}};
}

// Loads everything a training run needs so sweep can reuse it across gammas.
struct TrainInputs {
  Corpus source;
  EmbeddingMatrix y;
  EmbeddingMatrix pretrained;
  SeedLexicon seeds;
  bool froze_target = false;
};

TrainInputs load_train_inputs(const TrainOpts& o, const TrainConfig& cfg) {
  require_file(o.source_corpus, "--source-corpus");
  const bool need_iso = cfg.gamma < 1.0;
  if (need_iso) require_file(o.seeds, "--seeds");
  if (o.target_embeddings.empty() && o.target_corpus.empty() && need_iso)
    throw std::runtime_error(
        "need --target-embeddings or --target-corpus when gamma < 1");
  if (!o.target_embeddings.empty())
    require_file(o.target_embeddings, "--target-embeddings");
  if (!o.target_corpus.empty()) require_file(o.target_corpus, "--target-corpus");
  if (!o.pretrained.empty()) require_file(o.pretrained, "--pretrained");

  TrainInputs in;
  in.source = load_corpus(o.source_corpus, cfg.min_count);
  if (need_iso) {
    if (!o.target_embeddings.empty()) {
      in.y = load_word2vec_text(o.target_embeddings);
    } else {
      Corpus target = load_corpus(o.target_corpus, cfg.min_count);
      in.y = freeze_target(cfg, target);
      in.froze_target = true;
    }
    in.pretrained = o.pretrained.empty() ? in.y : load_word2vec_text(o.pretrained);
    in.seeds = load_seed_lexicon(o.seeds, o.splits.ranges());
  }
  return in;
}

TrainResult run_training(const TrainInputs& in, const TrainConfig& cfg) {
  if (cfg.gamma >= 1.0) return train_sgns_only(cfg, in.source);
  return train(cfg, in.source, in.y, in.pretrained, in.seeds);
}

int cmd_train(TrainOpts& o) {
  const TrainConfig cfg = resolve_config(o);
  const TrainInputs inputs = load_train_inputs(o, cfg);

  fs::create_directories(o.out_dir);
  TrainResult result = run_training(inputs, cfg);

  const fs::path x_path = fs::path(o.out_dir) / "x.vec";
  save_word2vec_text(result.x, x_path);
  fs::path gat_path;
  if (result.gat) {
    gat_path = fs::path(o.out_dir) / "gat.txt";
    save_gat_params(*result.gat, gat_path);
  }
  if (inputs.froze_target)
    save_word2vec_text(inputs.y, fs::path(o.out_dir) / "y.vec");

  const TrainReport& rep = result.report;
  json doc{{"config", config_to_json(cfg)},
           {"epochs", epochs_to_json(rep)},
           {"usable_seed_pairs", rep.usable_seed_pairs},
           {"skipped_seed_pairs", rep.skipped_seed_pairs},
           {"initialized_seed_rows", rep.initialized_seed_rows},
           {"graph", {{"nodes", rep.graph_nodes},
                      {"edges", rep.graph_edges},
                      {"missing_words", rep.graph_missing_words}}},
           {"iso_enabled", rep.iso_enabled},
           {"deterministic", rep.deterministic},
           {"checkpoints",
            {{"x", x_path.string()},
             {"gat", result.gat ? gat_path.string() : ""}}}};
  write_json(doc, fs::path(o.out_dir) / "train_report.json");

  std::cout << "trained " << result.x.size() << " x " << result.x.dim()
            << " source vectors in " << rep.wall_seconds << " s\n";
  for (std::size_t e = 0; e < rep.epochs.size(); ++e)
    std::cout << "epoch " << e << ": dis=" << rep.epochs[e].dis_loss
              << " iso=" << rep.epochs[e].iso_loss
              << " combined=" << rep.epochs[e].combined << '\n';
  if (rep.iso_enabled)
    std::cout << "seeds: " << rep.usable_seed_pairs << " usable, "
              << rep.skipped_seed_pairs << " skipped; graph: "
              << rep.graph_nodes << " nodes, " << rep.graph_edges
              << " edges\n";
  std::cout << "checkpoint: " << x_path.string() << '\n';
  return 0;
}

struct EvalOpts {
  std::string x_path, y_path, seeds;
  SplitOpts splits;
  std::string eval_split = "test";
  std::string report;
  bool with_metrics = false;
  int k = 10;
};

std::span<const SeedPair> pick_split(const SeedLexicon& lex,
                                     const std::string& name) {
  if (name == "train") return lex.train();
  if (name == "dev") return lex.dev();
  if (name == "test") return lex.test();
  throw std::runtime_error("unknown split '" + name +
                           "' (expected train | dev | test)");
}

// Rows for seed pairs resolvable in both spaces, for the isometry metrics.
std::pair<Matrix, Matrix> gather_seed_rows(const EmbeddingMatrix& x,
                                           const EmbeddingMatrix& y,
                                           std::span<const SeedPair> pairs) {
  std::vector<std::pair<int, int>> rows;
  for (const auto& p : pairs) {
    const int s = x.lookup(p.source);
    const int t = y.lookup(p.target);
    if (s >= 0 && t >= 0) rows.emplace_back(s, t);
  }
  if (rows.empty())
    throw std::runtime_error("no seed pairs resolvable in both spaces");
  Matrix xs(rows.size(), x.dim()), ys(rows.size(), y.dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto xr = x.vectors.row(static_cast<std::size_t>(rows[i].first));
    const auto yr = y.vectors.row(static_cast<std::size_t>(rows[i].second));
    std::copy(xr.begin(), xr.end(), xs.row(i).begin());
    std::copy(yr.begin(), yr.end(), ys.row(i).begin());
  }
  return {std::move(xs), std::move(ys)};
}

int cmd_evaluate(EvalOpts& o) {
  require_file(o.x_path, "--x");
  require_file(o.y_path, "--y");
  require_file(o.seeds, "--seeds");

  const EmbeddingMatrix x = load_word2vec_text(o.x_path);
  const EmbeddingMatrix y = load_word2vec_text(o.y_path);
  if (x.dim() != y.dim())
    throw std::runtime_error("embedding dimensionality mismatch: " +
                             std::to_string(x.dim()) + " vs " +
                             std::to_string(y.dim()));
  const SeedLexicon lex = load_seed_lexicon(o.seeds, o.splits.ranges());

  const EmbeddingMatrix xn = normalize(x);
  const EmbeddingMatrix yn = normalize(y);
  const MappingModel model = fit_mapping(xn, yn, lex.train());
  const EvalReport rep =
      precision_at_1(model, xn, yn, pick_split(lex, o.eval_split));

  json doc{{"p_at_1", rep.p_at_1},
           {"evaluated", rep.evaluated},
           {"skipped_oov", rep.skipped_oov},
           {"seed_pairs_used", rep.seed_pairs_used},
           {"split", o.eval_split}};
  if (o.with_metrics) {
    auto [xs, ys] = gather_seed_rows(x, y, lex.train());
    const IsometryReport iso = isometry_report(xs, ys, o.k);
    doc["isometry"] = {{"es", iso.es},
                       {"pearson_rho", iso.pearson_rho},
                       {"r_used", iso.r_used},
                       {"k_nn", iso.k_nn}};
  }

  std::cout << "P@1 = " << rep.p_at_1 << " over " << rep.evaluated
            << " source words (" << rep.skipped_oov << " OOV skipped, "
            << rep.seed_pairs_used << " train pairs fit)\n";
  if (!o.report.empty()) {
    write_json(doc, o.report);
  } else {
    std::cout << doc.dump(2) << '\n';
  }
  return 0;
}

struct MetricsOpts {
  std::string x_path, y_path, seeds;
  SplitOpts splits;
  std::string split = "train";
  std::string report;
  int k = 10;
};

int cmd_metrics(MetricsOpts& o) {
  require_file(o.x_path, "--x");
  require_file(o.y_path, "--y");
  require_file(o.seeds, "--seeds");

  const EmbeddingMatrix x = load_word2vec_text(o.x_path);
  const EmbeddingMatrix y = load_word2vec_text(o.y_path);
  const SeedLexicon lex = load_seed_lexicon(o.seeds, o.splits.ranges());
  auto [xs, ys] = gather_seed_rows(x, y, pick_split(lex, o.split));
  const IsometryReport rep = isometry_report(xs, ys, o.k);

  json doc{{"es", rep.es},
           {"pearson_rho", rep.pearson_rho},
           {"r_used", rep.r_used},
           {"k_nn", rep.k_nn},
           {"seed_rows", xs.rows()},
           {"split", o.split}};
  std::cout << "ES = " << rep.es << " (lower is more isomorphic), rho = "
            << rep.pearson_rho << " (higher is more isomorphic), r = "
            << rep.r_used << ", k = " << rep.k_nn << '\n';
  if (!o.report.empty()) {
    write_json(doc, o.report);
  } else {
    std::cout << doc.dump(2) << '\n';
  }
  return 0;
}

struct SweepOpts {
  TrainOpts train;
  std::vector<double> gammas{0.0, 0.333, 1.0};
};

int cmd_sweep(SweepOpts& o) {
  const TrainConfig base = resolve_config(o.train);
  if (o.gammas.empty()) throw std::runtime_error("--gammas must not be empty");
  require_file(o.train.seeds, "--seeds");

  // Inputs load once with the iso requirements of the smallest gamma.
  TrainConfig probe = base;
  probe.gamma = *std::min_element(o.gammas.begin(), o.gammas.end());
  const TrainInputs inputs = load_train_inputs(o.train, probe);
  const SeedLexicon lex = load_seed_lexicon(o.train.seeds, o.train.splits.ranges());

  struct Row {
    double gamma;
    EvalReport rep;
  };
  std::vector<Row> rows;
  for (double gamma : o.gammas) {
    TrainConfig cfg = base;
    cfg.gamma = gamma;
    TrainResult result = run_training(inputs, cfg);
    const EmbeddingMatrix xn = normalize(result.x);
    const EmbeddingMatrix yn = normalize(inputs.y);
    const MappingModel model = fit_mapping(xn, yn, lex.train());
    rows.push_back({gamma, precision_at_1(model, xn, yn, lex.dev())});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.rep.p_at_1 > b.rep.p_at_1;
  });

  fs::create_directories(o.train.out_dir);
  json table = json::array();
  std::cout << "gamma    dev P@1   evaluated  skipped_oov\n";
  for (const auto& row : rows) {
    std::printf("%-8g %-9g %-10d %d\n", row.gamma, row.rep.p_at_1,
                row.rep.evaluated, row.rep.skipped_oov);
    table.push_back({{"gamma", row.gamma},
                     {"p_at_1", row.rep.p_at_1},
                     {"evaluated", row.rep.evaluated},
                     {"skipped_oov", row.rep.skipped_oov}});
  }
  write_json(json{{"rows", table}, {"split", "dev"}},
             fs::path(o.train.out_dir) / "sweep_report.json");
  return 0;
}

struct BuildGraphOpts {
  std::string pretrained, seeds;
  SplitOpts splits;
  std::string split = "train";
  double eta = 0.4;
  std::string out = "graph_edges.tsv";
};

int cmd_build_graph(BuildGraphOpts& o) {
  require_file(o.pretrained, "--pretrained");
  require_file(o.seeds, "--seeds");

  const EmbeddingMatrix pre = load_word2vec_text(o.pretrained);
  const SeedLexicon lex = load_seed_lexicon(o.seeds, o.splits.ranges());
  const std::vector<std::string> targets =
      unique_targets(pick_split(lex, o.split));
  const SemanticGraph g = build_graph(targets, pre, o.eta);

  save_edge_list(g, o.out);
  std::ofstream nodes(o.out + ".nodes");
  for (std::size_t i = 0; i < g.words.size(); ++i)
    nodes << i << '\t' << g.words[i] << '\n';

  std::cout << "graph: " << g.node_count() << " nodes, " << g.edge_count()
            << " edges, " << g.missing_words
            << " words without pretrained vectors (eta=" << g.eta << ")\n"
            << "edges: " << o.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Cross-lingual embedding alignment: skip-gram training with "
      "graph-attention isomorphism losses, Procrustes mapping and isometry "
      "diagnostics"};
  app.require_subcommand(1);

  TrainOpts train_opts;
  CLI::App* train_cmd = app.add_subcommand(
      "train", "Train source embeddings against a frozen target space");
  add_train_options(train_cmd, train_opts);

  EvalOpts eval_opts;
  CLI::App* eval_cmd = app.add_subcommand(
      "evaluate", "Fit the mapping pipeline on train seeds and score P@1");
  eval_cmd->add_option("--x", eval_opts.x_path, "Source embeddings");
  eval_cmd->add_option("--y", eval_opts.y_path, "Target embeddings");
  eval_cmd->add_option("--seeds", eval_opts.seeds, "Seed dictionary");
  add_split_options(eval_cmd, eval_opts.splits);
  eval_cmd->add_option("--split", eval_opts.eval_split,
                       "Split to score: train | dev | test");
  eval_cmd->add_option("--report", eval_opts.report, "Report JSON path");
  eval_cmd->add_flag("--with-metrics", eval_opts.with_metrics,
                     "Include the isometry block");
  eval_cmd->add_option("--k", eval_opts.k, "k-NN size for the isometry block");

  MetricsOpts metrics_opts;
  CLI::App* metrics_cmd =
      app.add_subcommand("metrics", "Isometry diagnostics over seed rows");
  metrics_cmd->add_option("--x", metrics_opts.x_path, "Source embeddings");
  metrics_cmd->add_option("--y", metrics_opts.y_path, "Target embeddings");
  metrics_cmd->add_option("--seeds", metrics_opts.seeds, "Seed dictionary");
  add_split_options(metrics_cmd, metrics_opts.splits);
  metrics_cmd->add_option("--split", metrics_opts.split,
                          "Seed split to use (default train)");
  metrics_cmd->add_option("--k", metrics_opts.k, "Neighbors per node");
  metrics_cmd->add_option("--report", metrics_opts.report, "Report JSON path");

  SweepOpts sweep_opts;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Train and score the dev split for each gamma");
  add_train_options(sweep_cmd, sweep_opts.train);
  sweep_cmd->add_option("--gammas", sweep_opts.gammas, "Gamma values to sweep")
      ->delimiter(',');

  BuildGraphOpts graph_opts;
  CLI::App* graph_cmd = app.add_subcommand(
      "build-graph", "Export the semantic-relatedness graph as an edge list");
  graph_cmd->add_option("--pretrained", graph_opts.pretrained,
                        "Pretrained target embeddings");
  graph_cmd->add_option("--seeds", graph_opts.seeds, "Seed dictionary");
  add_split_options(graph_cmd, graph_opts.splits);
  graph_cmd->add_option("--split", graph_opts.split, "Seed split to use");
  graph_cmd->add_option("--eta", graph_opts.eta, "Cosine threshold");
  graph_cmd->add_option("--out", graph_opts.out, "Edge list path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return cmd_train(train_opts);
    if (eval_cmd->parsed()) return cmd_evaluate(eval_opts);
    if (metrics_cmd->parsed()) return cmd_metrics(metrics_opts);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts);
    if (graph_cmd->parsed()) return cmd_build_graph(graph_opts);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
