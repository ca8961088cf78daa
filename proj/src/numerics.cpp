#include "xliso/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace xliso {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kConvergence = 1e-12;

// Orthonormal completion: fill column `col` of u with a unit vector
// orthogonal to all columns < col (used for zero singular values).
void complete_column(Matrix& u, std::size_t col) {
  const std::size_t a = u.rows();
  std::vector<double> cand(a, 0.0);
  for (std::size_t attempt = 0; attempt < a; ++attempt) {
    std::fill(cand.begin(), cand.end(), 0.0);
    cand[attempt] = 1.0;
    for (std::size_t j = 0; j < col; ++j) {
      double proj = 0.0;
      for (std::size_t r = 0; r < a; ++r) proj += cand[r] * u(r, j);
      for (std::size_t r = 0; r < a; ++r) cand[r] -= proj * u(r, j);
    }
    double norm = 0.0;
    for (double x : cand) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.5) {  // e_attempt was not (nearly) in the span
      for (std::size_t r = 0; r < a; ++r) u(r, col) = cand[r] / norm;
      return;
    }
  }
  throw std::runtime_error("svd: failed to complete orthonormal basis");
}

// One-sided Jacobi on a (rows >= cols): rotates column pairs until all are
// mutually orthogonal, then sigma_j = ||a_j||, u_j = a_j / sigma_j.
SvdResult svd_tall(Matrix a) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  Matrix v = Matrix::identity(cols);

  for (int sweep = 0;; ++sweep) {
    if (sweep >= kMaxSweeps)
      throw std::runtime_error("svd: no convergence after 100 sweeps");
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
          const double x = a(r, p);
          const double y = a(r, q);
          app += x * x;
          aqq += y * y;
          apq += x * y;
        }
        if (app == 0.0 || aqq == 0.0) continue;
        const double denom = std::sqrt(app * aqq);
        off = std::max(off, std::abs(apq) / denom);
        if (std::abs(apq) <= kConvergence * denom) continue;

        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < rows; ++r) {
          const double x = a(r, p);
          const double y = a(r, q);
          a(r, p) = c * x - s * y;
          a(r, q) = s * x + c * y;
        }
        for (std::size_t r = 0; r < cols; ++r) {
          const double x = v(r, p);
          const double y = v(r, q);
          v(r, p) = c * x - s * y;
          v(r, q) = s * x + c * y;
        }
      }
    }
    if (off < kConvergence) break;
  }

  std::vector<double> sigma(cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    double norm = 0.0;
    for (std::size_t r = 0; r < rows; ++r) norm += a(r, j) * a(r, j);
    sigma[j] = std::sqrt(norm);
  }

  // Sort descending; apply the permutation to the columns of a and v.
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

  SvdResult out;
  out.u = Matrix(rows, cols);
  out.v = Matrix(cols, cols);
  out.sigma.resize(cols);
  const double sigma_max = sigma.empty() ? 0.0 : sigma[order[0]];
  for (std::size_t j = 0; j < cols; ++j) {
    const std::size_t src = order[j];
    out.sigma[j] = sigma[src];
    for (std::size_t r = 0; r < cols; ++r) out.v(r, j) = v(r, src);
    if (sigma[src] > sigma_max * 1e-300 && sigma[src] > 0.0) {
      for (std::size_t r = 0; r < rows; ++r) out.u(r, j) = a(r, src) / sigma[src];
    } else {
      out.sigma[j] = 0.0;
      complete_column(out.u, j);
    }
  }
  return out;
}

}  // namespace

SvdResult svd(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0)
    throw std::invalid_argument("svd: empty matrix");
  if (!m.all_finite()) throw std::invalid_argument("svd: non-finite entries");
  if (m.rows() >= m.cols()) return svd_tall(m);
  SvdResult t = svd_tall(transposed(m));
  return SvdResult{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

namespace {

SymEigResult jacobi_eigen(Matrix s, bool want_vectors) {
  const std::size_t n = s.rows();
  Matrix vecs = want_vectors ? Matrix::identity(n) : Matrix();
  const double scale = std::max(1.0, s.frobenius_norm());

  for (int sweep = 0;; ++sweep) {
    if (sweep >= kMaxSweeps)
      throw std::runtime_error("sym_eigen: no convergence after 100 sweeps");
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * s(p, q) * s(p, q);
    if (std::sqrt(off) < kConvergence * scale) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = s(p, q);
        if (std::abs(apq) < kConvergence * scale / (n * n)) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = c * t;

        for (std::size_t r = 0; r < n; ++r) {
          const double x = s(r, p);
          const double y = s(r, q);
          s(r, p) = c * x - sn * y;
          s(r, q) = sn * x + c * y;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double x = s(p, r);
          const double y = s(q, r);
          s(p, r) = c * x - sn * y;
          s(q, r) = sn * x + c * y;
        }
        if (want_vectors) {
          for (std::size_t r = 0; r < n; ++r) {
            const double x = vecs(r, p);
            const double y = vecs(r, q);
            vecs(r, p) = c * x - sn * y;
            vecs(r, q) = sn * x + c * y;
          }
        }
      }
    }
  }

  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = s(i, i);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });

  SymEigResult out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = values[order[i]];
  if (want_vectors) {
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t r = 0; r < n; ++r) out.vectors(r, j) = vecs(r, order[j]);
  }
  return out;
}

void check_symmetric(const Matrix& s) {
  if (s.rows() != s.cols())
    throw std::invalid_argument("sym_eigen: matrix is not square");
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = i + 1; j < s.cols(); ++j)
      if (std::abs(s(i, j) - s(j, i)) >= 1e-10)
        throw std::invalid_argument("sym_eigen: matrix is not symmetric");
}

}  // namespace

std::vector<double> sym_eigen(const Matrix& s) {
  check_symmetric(s);
  return jacobi_eigen(s, /*want_vectors=*/false).values;
}

SymEigResult sym_eigen_full(const Matrix& s) {
  check_symmetric(s);
  return jacobi_eigen(s, /*want_vectors=*/true);
}

AdamState::AdamState(std::size_t rows, std::size_t cols, AdamHyper hyper)
    : m_(rows, cols), v_(rows, cols), t_(rows, 0), hyper_(hyper) {}

void AdamState::step_row(Matrix& params, std::size_t row,
                         std::span<const double> grad) {
  if (grad.size() != params.cols())
    throw std::invalid_argument("adam: gradient shape mismatch");
  if (row >= params.rows() || params.rows() != m_.rows() ||
      params.cols() != m_.cols())
    throw std::invalid_argument("adam: parameter shape mismatch");

  const std::int64_t t = ++t_[row];
  const double bc1 = 1.0 - std::pow(hyper_.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(hyper_.beta2, static_cast<double>(t));
  auto m = m_.row(row);
  auto v = v_.row(row);
  auto p = params.row(row);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    m[i] = hyper_.beta1 * m[i] + (1.0 - hyper_.beta1) * grad[i];
    v[i] = hyper_.beta2 * v[i] + (1.0 - hyper_.beta2) * grad[i] * grad[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    p[i] -= hyper_.lr * mhat / (std::sqrt(vhat) + hyper_.eps);
  }
}

void AdamState::step(Matrix& params, const Matrix& grads) {
  if (params.rows() != grads.rows() || params.cols() != grads.cols())
    throw std::invalid_argument("adam: gradient shape mismatch");
  for (std::size_t r = 0; r < params.rows(); ++r)
    step_row(params, r, grads.row(r));
}

}  // namespace xliso
