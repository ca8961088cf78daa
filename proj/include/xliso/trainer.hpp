#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xliso/corpus.hpp"
#include "xliso/embedding.hpp"
#include "xliso/graph_attention.hpp"
#include "xliso/semantic_graph.hpp"

namespace xliso {

enum class IsoVariant { l2, proc, proc_src };

IsoVariant iso_variant_from_string(const std::string& s);
std::string to_string(IsoVariant v);

struct TrainConfig {
  // Objective mix: loss = gamma * distributional + (1 - gamma) * isomorphism.
  double gamma = 0.333;
  double eta = 0.4;       // graph cosine threshold
  int k_neg = 10;         // negative samples per context pair
  double lr = 0.001;      // Adam learning rate
  int dim = 100;
  int epochs = 5;
  int batch_size = 512;   // center-context pairs per optimizer step
  int iso_interval = 1;   // batches between isomorphism steps
  IsoVariant iso_variant = IsoVariant::proc_src;
  std::uint64_t seed = 1;
  GatActivation gat_activation = GatActivation::identity;
  bool literal_eq5 = false;
  bool squared_norm = false;  // squared-Frobenius variant of the iso losses

  // Corpus knobs (word2vec conventions).
  int window = 5;
  bool dynamic_window = true;
  int min_count = 5;
  double subsample = 1e-4;    // <= 0 disables frequent-word downsampling
  double noise_power = 0.75;  // unigram exponent of the noise distribution

  // threads > 1 runs the SGNS phase hogwild-style: unsynchronized row
  // writes, nondeterministic results, flagged in the report. Isomorphism
  // steps always run exclusively.
  int threads = 1;
};

struct TrainReport {
  struct Epoch {
    double dis_loss = 0.0;   // mean SGNS loss per pair
    double iso_loss = 0.0;   // mean isomorphism loss per step (0 if disabled)
    double combined = 0.0;   // gamma-weighted combination
  };
  std::vector<Epoch> epochs;
  double wall_seconds = 0.0;

  int usable_seed_pairs = 0;
  int skipped_seed_pairs = 0;
  int initialized_seed_rows = 0;  // proc_src only
  int graph_nodes = 0;
  std::size_t graph_edges = 0;
  int graph_missing_words = 0;
  bool iso_enabled = false;
  bool deterministic = true;

  // Touched-rows audit: which source input rows each gradient stream wrote.
  std::vector<std::uint8_t> sgns_touched_rows;
  std::vector<std::uint8_t> iso_touched_rows;
};

double combined_loss(double l_dis, double l_iso, double gamma);

struct TrainResult {
  EmbeddingMatrix x;              // trained source input vectors
  Matrix output_vectors;          // SGNS output table (not exported)
  std::optional<GatParams> gat;   // present when the isomorphism path ran
  TrainReport report;
};

// Trains source embeddings on `source`: every batch applies SGNS gradients
// scaled by gamma; every iso_interval batches one isomorphism step runs
// (gather source seed rows -> attention layer -> loss against the frozen
// target seed rows -> Adam on W, z and the seed rows, scaled by 1-gamma).
// At gamma = 1 the isomorphism path is inert and skipped entirely.
// `pretrained` supplies the graph-construction vectors and the proc_src
// initialization.
TrainResult train(const TrainConfig& cfg, const Corpus& source,
                  const EmbeddingMatrix& y_frozen,
                  const EmbeddingMatrix& pretrained, const SeedLexicon& seeds);

// Pure-SGNS run (no isomorphism path at all); gamma is forced to 1.
TrainResult train_sgns_only(const TrainConfig& cfg, const Corpus& corpus);

// Pure-SGNS training of the target side; the result is frozen by contract
// (nothing in this project writes to it afterwards).
EmbeddingMatrix freeze_target(const TrainConfig& cfg, const Corpus& target);

// Sidecar checkpoint for the attention parameters: header "d d'", then the
// d rows of W and one final row holding z (2d' values).
void save_gat_params(const GatParams& p, const std::filesystem::path& path);
GatParams load_gat_params(const std::filesystem::path& path);

}  // namespace xliso
