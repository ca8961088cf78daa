#include "xliso/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "xliso/iso_losses.hpp"
#include "xliso/numerics.hpp"
#include "xliso/sgns.hpp"

namespace xliso {

IsoVariant iso_variant_from_string(const std::string& s) {
  if (s == "l2") return IsoVariant::l2;
  if (s == "proc") return IsoVariant::proc;
  if (s == "proc_src") return IsoVariant::proc_src;
  throw std::invalid_argument("unknown isomorphism variant '" + s +
                              "' (expected l2 | proc | proc_src)");
}

std::string to_string(IsoVariant v) {
  switch (v) {
    case IsoVariant::l2: return "l2";
    case IsoVariant::proc: return "proc";
    case IsoVariant::proc_src: return "proc_src";
  }
  return "?";
}

double combined_loss(double l_dis, double l_iso, double gamma) {
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("combined_loss: gamma must be in [0, 1]");
  return gamma * l_dis + (1.0 - gamma) * l_iso;
}

namespace {

constexpr double kNoisePower = 0.75;
constexpr int kNegativeResampleAttempts = 16;

void validate_config(const TrainConfig& cfg) {
  if (cfg.gamma < 0.0 || cfg.gamma > 1.0)
    throw std::invalid_argument("train: gamma must be in [0, 1]");
  if (cfg.iso_interval < 1)
    throw std::invalid_argument("train: iso_interval must be >= 1");
  if (cfg.dim < 1) throw std::invalid_argument("train: dim must be >= 1");
  if (cfg.k_neg < 1) throw std::invalid_argument("train: k_neg must be >= 1");
  if (cfg.batch_size < 1)
    throw std::invalid_argument("train: batch_size must be >= 1");
  if (cfg.epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
  if (cfg.window < 1) throw std::invalid_argument("train: window must be >= 1");
  if (cfg.threads < 1) throw std::invalid_argument("train: threads must be >= 1");
}

struct IsoContext {
  SemanticGraph graph;
  std::vector<int> node_src_row;  // graph node -> source input row
  Matrix y_seed;                  // graph node -> frozen target row
  GatParams gat;
  AdamState adam_w;
  Matrix z_param;  // 1 x 2d view of gat.z for the optimizer
  AdamState adam_z;
};

// Resolves the train seeds against the source vocab and the frozen target
// vocabulary: one graph node per unique usable target word, whose source row
// comes from the last usable pair in file order.
IsoContext make_iso_context(const TrainConfig& cfg, const Corpus& source,
                            const EmbeddingMatrix& y_frozen,
                            const EmbeddingMatrix& pretrained,
                            const SeedLexicon& seeds, Rng& rng_gat,
                            TrainReport& report) {
  std::vector<std::string> node_words;
  std::unordered_map<std::string, int> node_of;
  std::vector<int> node_src;
  std::vector<int> node_tgt;

  for (const auto& pair : seeds.train()) {
    const int src = source.vocab.lookup(pair.source);
    const int tgt = y_frozen.lookup(pair.target);
    if (src < 0 || tgt < 0) {
      ++report.skipped_seed_pairs;
      continue;
    }
    ++report.usable_seed_pairs;
    auto [it, inserted] =
        node_of.emplace(pair.target, static_cast<int>(node_words.size()));
    if (inserted) {
      node_words.push_back(pair.target);
      node_src.push_back(src);
      node_tgt.push_back(tgt);
    } else {
      node_src[static_cast<std::size_t>(it->second)] = src;  // last pair wins
    }
  }
  if (node_words.empty())
    throw std::runtime_error(
        "train: zero usable seed pairs (check vocab coverage of the seed "
        "dictionary)");

  IsoContext ctx;
  ctx.graph = build_graph(node_words, pretrained, cfg.eta);
  ctx.node_src_row = std::move(node_src);
  ctx.y_seed = Matrix(node_words.size(), y_frozen.dim());
  for (std::size_t n = 0; n < node_words.size(); ++n) {
    const auto src = y_frozen.vectors.row(static_cast<std::size_t>(node_tgt[n]));
    std::copy(src.begin(), src.end(), ctx.y_seed.row(n).begin());
  }

  const std::size_t d = static_cast<std::size_t>(cfg.dim);
  ctx.gat = init_gat_params(d, rng_gat);
  const AdamHyper hyper{cfg.lr, 0.9, 0.999, 1e-8};
  ctx.adam_w = AdamState(d, d, hyper);
  ctx.z_param = Matrix(1, 2 * d);
  ctx.adam_z = AdamState(1, 2 * d, hyper);

  report.graph_nodes = static_cast<int>(ctx.graph.node_count());
  report.graph_edges = ctx.graph.edge_count();
  report.graph_missing_words = ctx.graph.missing_words;
  return ctx;
}

class Trainer {
 public:
  Trainer(const TrainConfig& cfg, const Corpus& source,
          const EmbeddingMatrix* y_frozen, const EmbeddingMatrix* pretrained,
          const SeedLexicon* seeds, bool want_iso)
      : cfg_(cfg),
        source_(source),
        rng_sgns_(Rng::derive(cfg.seed, 2)),
        noise_(noise_distribution(source.vocab, cfg.noise_power)) {
    validate_config(cfg);
    const std::size_t v = source.vocab.size();
    const std::size_t d = static_cast<std::size_t>(cfg.dim);

    Rng rng_init = Rng::derive(cfg.seed, 1);
    Matrix in_vecs(v, d);
    const double bound = 0.5 / static_cast<double>(d);
    for (std::size_t i = 0; i < v; ++i)
      for (std::size_t j = 0; j < d; ++j)
        in_vecs(i, j) = rng_init.uniform(-bound, bound);
    x_ = make_embedding(source.vocab.words, std::move(in_vecs));
    out_vecs_ = Matrix(v, d);

    const AdamHyper hyper{cfg.lr, 0.9, 0.999, 1e-8};
    adam_in_ = AdamState(v, d, hyper);
    adam_out_ = AdamState(v, d, hyper);

    report_.sgns_touched_rows.assign(v, 0);
    report_.iso_touched_rows.assign(v, 0);
    report_.deterministic = cfg.threads == 1;

    if (want_iso) {
      if (y_frozen == nullptr || pretrained == nullptr || seeds == nullptr)
        throw std::invalid_argument(
            "train: isomorphism training needs target embeddings, pretrained "
            "vectors and a seed lexicon");
      if (y_frozen->dim() != d)
        throw std::invalid_argument(
            "train: target embedding dimensionality differs from cfg.dim");
      Rng rng_gat = Rng::derive(cfg.seed, 3);
      iso_.emplace(make_iso_context(cfg, source, *y_frozen, *pretrained,
                                    *seeds, rng_gat, report_));
      report_.iso_enabled = true;
      if (cfg.iso_variant == IsoVariant::proc_src) {
        report_.initialized_seed_rows =
            init_seeds_from_target(x_, *pretrained, seeds->train());
      }
    }
    acc_.grad_in.reset(d);
    acc_.grad_out.reset(d);
  }

  TrainResult run() {
    const auto started = std::chrono::steady_clock::now();
    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
      epoch_dis_sum_ = 0.0;
      epoch_pairs_ = 0;
      epoch_iso_sum_ = 0.0;
      epoch_iso_steps_ = 0;

      if (cfg_.threads == 1) {
        run_epoch_deterministic();
      } else {
        run_epoch_hogwild(epoch);
      }

      TrainReport::Epoch e;
      e.dis_loss = epoch_pairs_ > 0 ? epoch_dis_sum_ / epoch_pairs_ : 0.0;
      e.iso_loss =
          epoch_iso_steps_ > 0 ? epoch_iso_sum_ / epoch_iso_steps_ : 0.0;
      e.combined = combined_loss(e.dis_loss, e.iso_loss, cfg_.gamma);
      report_.epochs.push_back(e);
    }
    report_.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();

    TrainResult result;
    result.x = std::move(x_);
    result.output_vectors = std::move(out_vecs_);
    if (iso_) result.gat = std::move(iso_->gat);
    result.report = std::move(report_);
    return result;
  }

 private:
  void run_epoch_deterministic() {
    std::vector<int> kept;
    for (const auto& sentence : source_.sentences) {
      subsample_sentence(sentence, source_.vocab, cfg_.subsample, rng_sgns_, kept);
      emit_sentence_pairs(kept, rng_sgns_, [&](int center, int context) {
        process_pair(center, context, rng_sgns_);
      });
    }
    flush_batch();  // batches never span epochs
  }

  template <typename Sink>
  void emit_sentence_pairs(const std::vector<int>& sentence, Rng& rng,
                           Sink&& sink) {
    const int n = static_cast<int>(sentence.size());
    for (int i = 0; i < n; ++i) {
      const int w = cfg_.dynamic_window
                        ? 1 + static_cast<int>(rng.uniform_index(
                                  static_cast<std::uint64_t>(cfg_.window)))
                        : cfg_.window;
      const int lo = std::max(0, i - w);
      const int hi = std::min(n - 1, i + w);
      for (int j = lo; j <= hi; ++j) {
        if (j == i) continue;
        sink(sentence[static_cast<std::size_t>(i)],
             sentence[static_cast<std::size_t>(j)]);
      }
    }
  }

  void process_pair(int center, int context, Rng& rng) {
    negatives_.clear();
    for (int k = 0; k < cfg_.k_neg; ++k) {
      int id = noise_.sample(rng);
      for (int attempt = 1;
           id == context && attempt < kNegativeResampleAttempts; ++attempt)
        id = noise_.sample(rng);
      negatives_.push_back(id);
    }
    epoch_dis_sum_ +=
        sgns_accumulate(acc_, center, context, negatives_, x_.vectors, out_vecs_);
    ++epoch_pairs_;
    if (++pairs_in_batch_ == cfg_.batch_size) flush_batch();
  }

  void flush_batch() {
    if (pairs_in_batch_ == 0) return;
    if (cfg_.gamma > 0.0) {
      const double scale =
          cfg_.gamma / static_cast<double>(pairs_in_batch_);
      apply_sparse(acc_.grad_in, scale, x_.vectors, adam_in_,
                   report_.sgns_touched_rows.data());
      apply_sparse(acc_.grad_out, scale, out_vecs_, adam_out_, nullptr);
    }
    acc_.loss = 0.0;
    acc_.grad_in.clear();
    acc_.grad_out.clear();
    pairs_in_batch_ = 0;
    ++batches_done_;
    if (iso_ && batches_done_ % cfg_.iso_interval == 0) iso_step();
  }

  void apply_sparse(const SparseRowGrad& grads, double scale, Matrix& params,
                    AdamState& adam, std::uint8_t* touched) {
    sorted_ids_ = grads.ids();
    std::sort(sorted_ids_.begin(), sorted_ids_.end());
    scaled_.resize(grads.dim());
    for (int id : sorted_ids_) {
      const auto row = grads.row_of(id);
      for (std::size_t c = 0; c < scaled_.size(); ++c) scaled_[c] = scale * row[c];
      adam.step_row(params, static_cast<std::size_t>(id), scaled_);
      if (touched) touched[id] = 1;
    }
  }

  void iso_step() {
    IsoContext& iso = *iso_;
    const std::size_t nodes = iso.graph.node_count();
    const std::size_t d = static_cast<std::size_t>(cfg_.dim);

    Matrix x_seed(nodes, d);
    for (std::size_t n = 0; n < nodes; ++n) {
      const auto src =
          x_.vectors.row(static_cast<std::size_t>(iso.node_src_row[n]));
      std::copy(src.begin(), src.end(), x_seed.row(n).begin());
    }

    const GatConfig gat_cfg{cfg_.gat_activation, cfg_.literal_eq5};
    auto [xp, cache] = gat_forward(x_seed, iso.graph, iso.gat, gat_cfg);

    double loss = 0.0;
    Matrix grad_xp;
    if (cfg_.iso_variant == IsoVariant::l2) {
      std::tie(loss, grad_xp) = l2_loss(xp, iso.y_seed, cfg_.squared_norm);
    } else {
      std::tie(loss, grad_xp) = procrustes_loss(xp, iso.y_seed, cfg_.squared_norm);
    }
    GatGrads grads = gat_backward(grad_xp, cache, iso.graph, iso.gat);

    const double scale = 1.0 - cfg_.gamma;
    for (std::size_t i = 0; i < grads.grad_w.rows(); ++i)
      for (std::size_t j = 0; j < grads.grad_w.cols(); ++j)
        grads.grad_w(i, j) *= scale;
    iso.adam_w.step(iso.gat.w, grads.grad_w);

    for (std::size_t j = 0; j < iso.z_param.cols(); ++j) {
      iso.z_param(0, j) = iso.gat.z[j];
      grads.grad_z[j] *= scale;
    }
    Matrix gz(1, iso.z_param.cols());
    std::copy(grads.grad_z.begin(), grads.grad_z.end(), gz.row(0).begin());
    iso.adam_z.step(iso.z_param, gz);
    for (std::size_t j = 0; j < iso.z_param.cols(); ++j)
      iso.gat.z[j] = iso.z_param(0, j);

    // Several nodes may share one source row; accumulate before stepping.
    seed_grads_.reset(d);
    for (std::size_t n = 0; n < nodes; ++n)
      axpy(scale, grads.grad_x.row(n), seed_grads_.row(iso.node_src_row[n]));
    apply_sparse(seed_grads_, 1.0, x_.vectors, adam_in_,
                 report_.iso_touched_rows.data());

    epoch_iso_sum_ += loss;
    ++epoch_iso_steps_;
  }

  // Hogwild SGNS: workers share the tables with unsynchronized row writes.
  // Isomorphism steps run exclusively at segment boundaries that approximate
  // iso_interval batches. Nondeterministic by contract.
  void run_epoch_hogwild(int epoch) {
    const std::size_t n_sentences = source_.sentences.size();
    std::size_t total_tokens = 0;
    for (const auto& s : source_.sentences) total_tokens += s.size();
    const double pairs_per_sentence =
        n_sentences == 0
            ? 1.0
            : std::max(1.0, static_cast<double>(total_tokens) /
                                static_cast<double>(n_sentences) *
                                (cfg_.window + 1));
    const std::size_t segment_sentences = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               static_cast<double>(cfg_.iso_interval) * cfg_.batch_size /
               pairs_per_sentence));

    std::size_t begin = 0;
    int segment = 0;
    while (begin < n_sentences) {
      const std::size_t end = std::min(n_sentences, begin + segment_sentences);
      hogwild_segment(epoch, segment, begin, end);
      if (iso_) iso_step();
      begin = end;
      ++segment;
    }
  }

  void hogwild_segment(int epoch, int segment, std::size_t begin,
                       std::size_t end) {
    const int n_workers = cfg_.threads;
    std::atomic<double> dis_sum{0.0};
    std::atomic<std::int64_t> pair_count{0};

    auto worker = [&](int wid) {
      Rng rng = Rng::derive(cfg_.seed,
                            0x100000ULL + static_cast<std::uint64_t>(epoch) * 65536 +
                                static_cast<std::uint64_t>(segment) * 64 +
                                static_cast<std::uint64_t>(wid));
      SgnsBatchGrad acc;
      acc.grad_in.reset(static_cast<std::size_t>(cfg_.dim));
      acc.grad_out.reset(static_cast<std::size_t>(cfg_.dim));
      std::vector<int> negatives;
      std::vector<int> kept;
      double local_sum = 0.0;
      std::int64_t local_pairs = 0;
      int in_batch = 0;

      auto flush_local = [&]() {
        if (in_batch == 0) return;
        if (cfg_.gamma > 0.0) {
          const double scale = cfg_.gamma / static_cast<double>(in_batch);
          std::vector<double> scaled(static_cast<std::size_t>(cfg_.dim));
          for (std::size_t slot = 0; slot < acc.grad_in.ids().size(); ++slot) {
            const int id = acc.grad_in.ids()[slot];
            const auto row = acc.grad_in.row_at(slot);
            for (std::size_t c = 0; c < scaled.size(); ++c)
              scaled[c] = scale * row[c];
            adam_in_.step_row(x_.vectors, static_cast<std::size_t>(id), scaled);
            report_.sgns_touched_rows[static_cast<std::size_t>(id)] = 1;
          }
          for (std::size_t slot = 0; slot < acc.grad_out.ids().size(); ++slot) {
            const int id = acc.grad_out.ids()[slot];
            const auto row = acc.grad_out.row_at(slot);
            for (std::size_t c = 0; c < scaled.size(); ++c)
              scaled[c] = scale * row[c];
            adam_out_.step_row(out_vecs_, static_cast<std::size_t>(id), scaled);
          }
        }
        acc.loss = 0.0;
        acc.grad_in.clear();
        acc.grad_out.clear();
        in_batch = 0;
      };

      for (std::size_t s = begin + static_cast<std::size_t>(wid); s < end;
           s += static_cast<std::size_t>(n_workers)) {
        subsample_sentence(source_.sentences[s], source_.vocab, cfg_.subsample,
                           rng, kept);
        emit_sentence_pairs(kept, rng, [&](int center, int context) {
          negatives.clear();
          for (int k = 0; k < cfg_.k_neg; ++k) {
            int id = noise_.sample(rng);
            for (int attempt = 1;
                 id == context && attempt < kNegativeResampleAttempts; ++attempt)
              id = noise_.sample(rng);
            negatives.push_back(id);
          }
          local_sum += sgns_accumulate(acc, center, context, negatives,
                                       x_.vectors, out_vecs_);
          ++local_pairs;
          if (++in_batch == cfg_.batch_size) flush_local();
        });
      }
      flush_local();

      double expected = dis_sum.load();
      while (!dis_sum.compare_exchange_weak(expected, expected + local_sum)) {
      }
      pair_count.fetch_add(local_pairs);
    };

    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker, w);
    for (auto& t : threads) t.join();

    epoch_dis_sum_ += dis_sum.load();
    epoch_pairs_ += pair_count.load();
  }

  TrainConfig cfg_;
  const Corpus& source_;
  Rng rng_sgns_;
  NoiseDistribution noise_;

  EmbeddingMatrix x_;
  Matrix out_vecs_;
  AdamState adam_in_;
  AdamState adam_out_;
  std::optional<IsoContext> iso_;
  TrainReport report_;

  SgnsBatchGrad acc_;
  SparseRowGrad seed_grads_;
  std::vector<int> negatives_;
  std::vector<int> sorted_ids_;
  std::vector<double> scaled_;
  int pairs_in_batch_ = 0;
  std::int64_t batches_done_ = 0;

  double epoch_dis_sum_ = 0.0;
  std::int64_t epoch_pairs_ = 0;
  double epoch_iso_sum_ = 0.0;
  std::int64_t epoch_iso_steps_ = 0;
};

}  // namespace

TrainResult train(const TrainConfig& cfg, const Corpus& source,
                  const EmbeddingMatrix& y_frozen,
                  const EmbeddingMatrix& pretrained, const SeedLexicon& seeds) {
  // gamma = 1 collapses the objective to pure SGNS; the isomorphism stream
  // is scaled by exactly zero, so it is skipped outright.
  const bool want_iso = cfg.gamma < 1.0;
  Trainer t(cfg, source, &y_frozen, &pretrained, &seeds, want_iso);
  return t.run();
}

TrainResult train_sgns_only(const TrainConfig& cfg, const Corpus& corpus) {
  TrainConfig pure = cfg;
  pure.gamma = 1.0;
  Trainer t(pure, corpus, nullptr, nullptr, nullptr, /*want_iso=*/false);
  return t.run();
}

EmbeddingMatrix freeze_target(const TrainConfig& cfg, const Corpus& target) {
  return train_sgns_only(cfg, target).x;
}

void save_gat_params(const GatParams& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("save_gat_params: cannot open " + path.string());
  const std::size_t d = p.w.rows();
  const std::size_t dp = p.w.cols();
  out << d << ' ' << dp << '\n';
  char buf[40];
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < dp; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", p.w(i, j));
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  }
  for (std::size_t j = 0; j < p.z.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", p.z[j]);
    out << (j ? " " : "") << buf;
  }
  out << '\n';
  if (!out)
    throw std::runtime_error("save_gat_params: write failed for " + path.string());
}

GatParams load_gat_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("load_gat_params: cannot open " + path.string());
  std::size_t d = 0, dp = 0;
  if (!(in >> d >> dp) || d == 0 || dp == 0)
    throw std::runtime_error("load_gat_params: bad header in " + path.string());
  GatParams p;
  p.w = Matrix(d, dp);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < dp; ++j)
      if (!(in >> p.w(i, j)))
        throw std::runtime_error("load_gat_params: truncated W in " + path.string());
  p.z.resize(2 * dp);
  for (std::size_t j = 0; j < 2 * dp; ++j)
    if (!(in >> p.z[j]))
      throw std::runtime_error("load_gat_params: truncated z in " + path.string());
  return p;
}

}  // namespace xliso
