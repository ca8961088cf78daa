#pragma once

#include <cmath>
#include <functional>

#include "xliso/matrix.hpp"
#include "xliso/rng.hpp"

namespace xliso::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng,
                            double scale = 1.0) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = scale * rng.gaussian();
  return m;
}

// Random orthogonal matrix via modified Gram-Schmidt on a gaussian matrix.
inline Matrix random_orthogonal(std::size_t n, Rng& rng) {
  Matrix a = random_matrix(n, n, rng);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double proj = 0.0;
      for (std::size_t r = 0; r < n; ++r) proj += a(r, j) * a(r, k);
      for (std::size_t r = 0; r < n; ++r) a(r, j) -= proj * a(r, k);
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < n; ++r) norm += a(r, j) * a(r, j);
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < n; ++r) a(r, j) /= norm;
  }
  return a;
}

inline double rel_err(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / denom;
}

// Central finite difference of f at x (f evaluated by the caller's closure).
inline double central_diff(const std::function<double(double)>& f, double x,
                           double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Worst relative error between an analytic gradient and central differences
// of `loss` over every entry of `point`.
inline double max_grad_rel_err(Matrix& point, const Matrix& analytic,
                               const std::function<double()>& loss,
                               double h = 1e-5) {
  double worst = 0.0;
  for (std::size_t i = 0; i < point.rows(); ++i) {
    for (std::size_t j = 0; j < point.cols(); ++j) {
      const double saved = point(i, j);
      point(i, j) = saved + h;
      const double up = loss();
      point(i, j) = saved - h;
      const double down = loss();
      point(i, j) = saved;
      worst = std::max(worst, rel_err((up - down) / (2.0 * h), analytic(i, j)));
    }
  }
  return worst;
}

}  // namespace xliso::testing
