#pragma once

#include <cstdint>
#include <vector>

#include "xliso/matrix.hpp"
#include "xliso/rng.hpp"
#include "xliso/semantic_graph.hpp"

namespace xliso {

enum class GatActivation { identity, tanh };

struct GatParams {
  Matrix w;               // d x d' shared projection (d' = d here)
  std::vector<double> z;  // length 2d': attention weights over [Wx_i || Wx_j]
};

// W ~ symmetric uniform fan-in scaling, z = 0 so training starts from
// uniform attention.
GatParams init_gat_params(std::size_t dim, Rng& rng);

struct GatConfig {
  GatActivation activation = GatActivation::identity;
  // Reproduces the layer output as a combination of the node's own projected
  // vector instead of its neighbors'; attention becomes irrelevant. Kept for
  // fidelity experiments only.
  bool literal_self_combination = false;
};

struct AttentionCache {
  Matrix inputs;     // s x d copy of the forward input
  Matrix projected;  // s x d' rows Wx_j
  // Per node i, aligned with attention_neighborhood(g, i):
  std::vector<std::vector<double>> scores_raw;  // pre-ReLU attention logits
  std::vector<std::vector<double>> alpha;       // softmax-normalized, sums to 1
  Matrix outputs;                               // s x d' post-activation
  GatConfig config;
  std::size_t nodes = 0;
};

// Single attention layer: beta_ij = ReLU(z^T [Wx_i || Wx_j]) over the fixed
// neighborhood of i (self included), alpha = softmax_j(beta), and
// x'_i = act(sum_j alpha_ij Wx_j).
std::pair<Matrix, AttentionCache> gat_forward(const Matrix& x_seed,
                                              const SemanticGraph& g,
                                              const GatParams& p,
                                              const GatConfig& cfg = {});

struct GatGrads {
  Matrix grad_w;               // d x d'
  std::vector<double> grad_z;  // 2d'
  Matrix grad_x;               // s x d
};

// Exact reverse-mode gradients of <upstream, outputs> w.r.t. W, z and the
// input rows. ReLU subgradient at 0 is taken as 0.
GatGrads gat_backward(const Matrix& upstream, const AttentionCache& cache,
                      const SemanticGraph& g, const GatParams& p);

}  // namespace xliso
