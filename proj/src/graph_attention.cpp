#include "xliso/graph_attention.hpp"

#include <cmath>
#include <stdexcept>

namespace xliso {

GatParams init_gat_params(std::size_t dim, Rng& rng) {
  GatParams p;
  p.w = Matrix(dim, dim);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) p.w(i, j) = rng.uniform(-bound, bound);
  p.z.assign(2 * dim, 0.0);
  return p;
}

std::pair<Matrix, AttentionCache> gat_forward(const Matrix& x_seed,
                                              const SemanticGraph& g,
                                              const GatParams& p,
                                              const GatConfig& cfg) {
  const std::size_t s = x_seed.rows();
  const std::size_t d = x_seed.cols();
  const std::size_t dp = p.w.cols();
  if (s != g.node_count())
    throw std::invalid_argument("gat_forward: rows do not align with graph nodes");
  if (p.w.rows() != d)
    throw std::invalid_argument("gat_forward: projection shape mismatch");
  if (p.z.size() != 2 * dp)
    throw std::invalid_argument("gat_forward: attention vector must have length 2d'");

  AttentionCache cache;
  cache.config = cfg;
  cache.nodes = s;
  cache.inputs = x_seed;
  cache.projected = matmul(x_seed, p.w);  // row j = x_j^T W
  cache.scores_raw.resize(s);
  cache.alpha.resize(s);
  cache.outputs = Matrix(s, dp);

  const std::span<const double> z1(p.z.data(), dp);
  const std::span<const double> z2(p.z.data() + dp, dp);

  for (std::size_t i = 0; i < s; ++i) {
    const auto nbh = attention_neighborhood(g, static_cast<int>(i));
    const double zi = dot(z1, cache.projected.row(i));

    auto& raw = cache.scores_raw[i];
    raw.resize(nbh.size());
    double beta_max = 0.0;  // ReLU outputs are >= 0
    std::vector<double> beta(nbh.size());
    for (std::size_t n = 0; n < nbh.size(); ++n) {
      const auto pj = cache.projected.row(static_cast<std::size_t>(nbh[n]));
      raw[n] = zi + dot(z2, pj);
      beta[n] = raw[n] > 0.0 ? raw[n] : 0.0;
      beta_max = std::max(beta_max, beta[n]);
    }

    auto& alpha = cache.alpha[i];
    alpha.resize(nbh.size());
    double denom = 0.0;
    for (std::size_t n = 0; n < nbh.size(); ++n) {
      alpha[n] = std::exp(beta[n] - beta_max);
      denom += alpha[n];
    }
    for (double& a : alpha) a /= denom;

    auto out = cache.outputs.row(i);
    for (std::size_t n = 0; n < nbh.size(); ++n) {
      const std::size_t src =
          cfg.literal_self_combination ? i : static_cast<std::size_t>(nbh[n]);
      axpy(alpha[n], cache.projected.row(src), out);
    }
    if (cfg.activation == GatActivation::tanh)
      for (double& v : out) v = std::tanh(v);
  }
  return {cache.outputs, cache};
}

GatGrads gat_backward(const Matrix& upstream, const AttentionCache& cache,
                      const SemanticGraph& g, const GatParams& p) {
  const std::size_t s = cache.nodes;
  const std::size_t dp = cache.projected.cols();
  if (upstream.rows() != s || upstream.cols() != dp)
    throw std::invalid_argument("gat_backward: upstream shape mismatch");
  if (g.node_count() != s || cache.scores_raw.size() != s)
    throw std::invalid_argument("gat_backward: cache does not match graph");

  const std::span<const double> z1(p.z.data(), dp);
  const std::span<const double> z2(p.z.data() + dp, dp);

  Matrix grad_proj(s, dp);  // d<loss>/d(projected rows)
  GatGrads out;
  out.grad_z.assign(2 * dp, 0.0);
  std::span<double> gz1(out.grad_z.data(), dp);
  std::span<double> gz2(out.grad_z.data() + dp, dp);

  std::vector<double> g_out(dp);
  std::vector<double> d_alpha;
  for (std::size_t i = 0; i < s; ++i) {
    const auto nbh = attention_neighborhood(g, static_cast<int>(i));
    const auto& raw = cache.scores_raw[i];
    const auto& alpha = cache.alpha[i];

    // Through the output activation.
    const auto u = upstream.row(i);
    if (cache.config.activation == GatActivation::tanh) {
      const auto y = cache.outputs.row(i);
      for (std::size_t c = 0; c < dp; ++c) g_out[c] = u[c] * (1.0 - y[c] * y[c]);
    } else {
      for (std::size_t c = 0; c < dp; ++c) g_out[c] = u[c];
    }

    // Linear combination: contributions to projected rows and to alpha.
    d_alpha.assign(nbh.size(), 0.0);
    for (std::size_t n = 0; n < nbh.size(); ++n) {
      const std::size_t src = cache.config.literal_self_combination
                                  ? i
                                  : static_cast<std::size_t>(nbh[n]);
      axpy(alpha[n], g_out, grad_proj.row(src));
      d_alpha[n] = dot(std::span<const double>(g_out), cache.projected.row(src));
    }

    // Softmax: d_beta_n = alpha_n * (d_alpha_n - sum_k alpha_k d_alpha_k).
    double mix = 0.0;
    for (std::size_t n = 0; n < nbh.size(); ++n) mix += alpha[n] * d_alpha[n];
    for (std::size_t n = 0; n < nbh.size(); ++n) {
      const double d_beta = alpha[n] * (d_alpha[n] - mix);
      if (raw[n] <= 0.0) continue;  // ReLU gate (subgradient at 0 is 0)
      const double d_raw = d_beta;
      // raw = z1 . proj_i + z2 . proj_j
      const auto pi = cache.projected.row(i);
      const auto pj = cache.projected.row(static_cast<std::size_t>(nbh[n]));
      axpy(d_raw, pi, gz1);
      axpy(d_raw, pj, gz2);
      axpy(d_raw, z1, grad_proj.row(i));
      axpy(d_raw, z2, grad_proj.row(static_cast<std::size_t>(nbh[n])));
    }
  }

  // projected = inputs * W, so grad_w = inputs^T * grad_proj and
  // grad_x = grad_proj * W^T.
  out.grad_w = matmul_tn(cache.inputs, grad_proj);
  out.grad_x = matmul_nt(grad_proj, p.w);
  return out;
}

}  // namespace xliso
