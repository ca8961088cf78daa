#include "xliso/isometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "xliso/embedding.hpp"
#include "xliso/numerics.hpp"

namespace xliso {

Matrix knn_adjacency(const Matrix& rows, int k) {
  const std::size_t s = rows.rows();
  if (k < 1 || static_cast<std::size_t>(k) >= s)
    throw std::invalid_argument("knn_adjacency: need s > k >= 1");

  Matrix adj(s, s);
  std::vector<std::pair<double, int>> scored(s - 1);
  for (std::size_t i = 0; i < s; ++i) {
    scored.clear();
    for (std::size_t j = 0; j < s; ++j) {
      if (j == i) continue;
      scored.emplace_back(cosine(rows.row(i), rows.row(j)), static_cast<int>(j));
    }
    // Top-k by cosine, ties toward the lower id.
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (int n = 0; n < k; ++n) {
      const auto j = static_cast<std::size_t>(scored[static_cast<std::size_t>(n)].second);
      adj(i, j) = 1.0;  // directed selection; symmetrized below
      adj(j, i) = 1.0;
    }
  }
  return adj;
}

namespace {

std::vector<double> laplacian_spectrum(const Matrix& adj) {
  const std::size_t s = adj.rows();
  Matrix lap(s, s);
  for (std::size_t i = 0; i < s; ++i) {
    double degree = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      degree += adj(i, j);
      lap(i, j) = -adj(i, j);
    }
    lap(i, i) = degree;
  }
  return sym_eigen(lap);
}

// Largest r such that the first r (ascending) eigenvalues sum to less than
// 90% of the total.
int retained_prefix(const std::vector<double>& eigenvalues) {
  const double total = kahan_sum(eigenvalues);
  if (total <= 0.0) return static_cast<int>(eigenvalues.size());
  const double cap = 0.9 * total;
  double acc = 0.0;
  int r = 0;
  for (double v : eigenvalues) {
    acc += v;
    if (acc >= cap) break;
    ++r;
  }
  return r;
}

}  // namespace

std::pair<double, int> eigenvector_similarity(const Matrix& x_seed,
                                              const Matrix& y_seed, int k) {
  if (x_seed.rows() != y_seed.rows())
    throw std::invalid_argument("eigenvector_similarity: row count mismatch");
  if (k < 1 || static_cast<std::size_t>(k) >= x_seed.rows())
    throw std::invalid_argument("eigenvector_similarity: need s > k >= 1");

  const std::vector<double> lx = laplacian_spectrum(knn_adjacency(x_seed, k));
  const std::vector<double> ly = laplacian_spectrum(knn_adjacency(y_seed, k));

  const int r = std::min(retained_prefix(lx), retained_prefix(ly));
  double es = 0.0;
  for (int i = 0; i < r; ++i) {
    const double d = lx[static_cast<std::size_t>(i)] - ly[static_cast<std::size_t>(i)];
    es += d * d;
  }
  return {es, r};
}

double pearson_seed_correlation(const Matrix& x_seed, const Matrix& y_seed) {
  const std::size_t s = x_seed.rows();
  if (s != y_seed.rows())
    throw std::invalid_argument("pearson_seed_correlation: row count mismatch");
  if (s < 3)
    throw std::invalid_argument("pearson_seed_correlation: need at least 3 seeds");

  std::vector<double> xs, ys;
  xs.reserve(s * (s - 1) / 2);
  ys.reserve(s * (s - 1) / 2);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i + 1; j < s; ++j) {
      xs.push_back(cosine(x_seed.row(i), x_seed.row(j)));
      ys.push_back(cosine(y_seed.row(i), y_seed.row(j)));
    }

  const double n = static_cast<double>(xs.size());
  const double mx = kahan_sum(xs) / n;
  const double my = kahan_sum(ys) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::runtime_error(
        "pearson_seed_correlation: undefined for a constant cosine list");

  // Cauchy-Schwarz equality means exact collinearity; identical lists land
  // here and must report exactly +/-1.
  if (sxy * sxy == sxx * syy) return sxy > 0.0 ? 1.0 : -1.0;
  const double rho = sxy / (std::sqrt(sxx) * std::sqrt(syy));
  return std::clamp(rho, -1.0, 1.0);
}

IsometryReport isometry_report(const Matrix& x_seed, const Matrix& y_seed,
                               int k) {
  IsometryReport rep;
  rep.k_nn = k;
  auto [es, r] = eigenvector_similarity(x_seed, y_seed, k);
  rep.es = es;
  rep.r_used = r;
  rep.pearson_rho = pearson_seed_correlation(x_seed, y_seed);
  return rep;
}

}  // namespace xliso
