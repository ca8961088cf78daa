#include "xliso/iso_losses.hpp"

#include <cmath>
#include <stdexcept>

#include "xliso/numerics.hpp"

namespace xliso {

namespace {

void check_shapes(const Matrix& xp, const Matrix& y) {
  if (xp.rows() != y.rows() || xp.cols() != y.cols())
    throw std::invalid_argument("isomorphism loss: shape mismatch");
  if (xp.rows() == 0) throw std::invalid_argument("isomorphism loss: empty input");
}

}  // namespace

std::pair<double, Matrix> l2_loss(const Matrix& xp, const Matrix& y_seed,
                                  bool squared) {
  check_shapes(xp, y_seed);
  const double n = static_cast<double>(xp.rows());

  Matrix diff(xp.rows(), xp.cols());
  double sq = 0.0;
  for (std::size_t i = 0; i < xp.rows(); ++i)
    for (std::size_t j = 0; j < xp.cols(); ++j) {
      const double d = xp(i, j) - y_seed(i, j);
      diff(i, j) = d;
      sq += d * d;
    }

  if (squared) {
    const double loss = sq / n;
    for (std::size_t i = 0; i < diff.rows(); ++i)
      for (std::size_t j = 0; j < diff.cols(); ++j) diff(i, j) *= 2.0 / n;
    return {loss, std::move(diff)};
  }

  const double fro = std::sqrt(sq);
  const double loss = fro / n;
  if (fro == 0.0) {
    // Subgradient at the minimum: zero.
    for (std::size_t i = 0; i < diff.rows(); ++i)
      for (std::size_t j = 0; j < diff.cols(); ++j) diff(i, j) = 0.0;
    return {0.0, std::move(diff)};
  }
  const double scale = 1.0 / (n * fro);
  for (std::size_t i = 0; i < diff.rows(); ++i)
    for (std::size_t j = 0; j < diff.cols(); ++j) diff(i, j) *= scale;
  return {loss, std::move(diff)};
}

ProcrustesSolution procrustes_solve(const Matrix& xp, const Matrix& y_seed) {
  check_shapes(xp, y_seed);
  const std::size_t d = xp.cols();
  const double n = static_cast<double>(xp.rows());

  ProcrustesSolution sol;
  if (xp.max_abs() == 0.0) {
    sol.w_p = Matrix::identity(d);
    sol.residual = y_seed.frobenius_norm() / n;
    return sol;
  }

  // m = Y^T Xp = P Sigma Q^T, minimizer W_p = Q P^T.
  const Matrix m = matmul_tn(y_seed, xp);
  const SvdResult dec = svd(m);  // m = u Sigma v^T, so P = u, Q = v
  sol.w_p = matmul_nt(dec.v, dec.u);

  Matrix mapped = matmul(xp, sol.w_p);
  double sq = 0.0;
  for (std::size_t i = 0; i < mapped.rows(); ++i)
    for (std::size_t j = 0; j < mapped.cols(); ++j) {
      const double diff = mapped(i, j) - y_seed(i, j);
      sq += diff * diff;
    }
  sol.residual = std::sqrt(sq) / n;
  return sol;
}

std::pair<double, Matrix> procrustes_loss(const Matrix& xp,
                                          const Matrix& y_seed, bool squared) {
  const ProcrustesSolution sol = procrustes_solve(xp, y_seed);
  const double n = static_cast<double>(xp.rows());

  // Residual R = Xp W_p - Y with W_p frozen; grad of ||R||_F / N is
  // R W_p^T / (N ||R||_F).
  Matrix mapped = matmul(xp, sol.w_p);
  double sq = 0.0;
  for (std::size_t i = 0; i < mapped.rows(); ++i)
    for (std::size_t j = 0; j < mapped.cols(); ++j) {
      mapped(i, j) -= y_seed(i, j);
      sq += mapped(i, j) * mapped(i, j);
    }

  if (squared) {
    const double loss = sq / n;
    Matrix grad = matmul_nt(mapped, sol.w_p);
    for (std::size_t i = 0; i < grad.rows(); ++i)
      for (std::size_t j = 0; j < grad.cols(); ++j) grad(i, j) *= 2.0 / n;
    return {loss, std::move(grad)};
  }

  const double fro = std::sqrt(sq);
  if (fro == 0.0) return {0.0, Matrix(xp.rows(), xp.cols())};
  Matrix grad = matmul_nt(mapped, sol.w_p);
  const double scale = 1.0 / (n * fro);
  for (std::size_t i = 0; i < grad.rows(); ++i)
    for (std::size_t j = 0; j < grad.cols(); ++j) grad(i, j) *= scale;
  return {fro / n, std::move(grad)};
}

int init_seeds_from_target(EmbeddingMatrix& x, const EmbeddingMatrix& y_pre,
                           std::span<const SeedPair> train_pairs) {
  if (x.dim() != y_pre.dim())
    throw std::invalid_argument("init_seeds_from_target: dimension mismatch");
  std::vector<bool> touched(x.size(), false);
  int initialized = 0;
  for (const auto& pair : train_pairs) {
    const int src = x.lookup(pair.source);
    const int tgt = y_pre.lookup(pair.target);
    if (src < 0 || tgt < 0) continue;
    auto dst = x.vectors.row(static_cast<std::size_t>(src));
    const auto from = y_pre.vectors.row(static_cast<std::size_t>(tgt));
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = from[j];
    if (!touched[static_cast<std::size_t>(src)]) {
      touched[static_cast<std::size_t>(src)] = true;
      ++initialized;
    }
  }
  return initialized;
}

}  // namespace xliso
