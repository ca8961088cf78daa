#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xliso/matrix.hpp"

namespace xliso {

struct SvdResult {
  Matrix u;                   // a x k, orthonormal columns
  std::vector<double> sigma;  // k values, non-negative, descending
  Matrix v;                   // b x k, orthonormal columns
};

// Thin SVD m = u * diag(sigma) * v^T with k = min(rows, cols), computed by
// one-sided Jacobi. Accurate and dependency-free for the d <= few hundred
// matrices this project sees. Throws on non-convergence after 100 sweeps.
SvdResult svd(const Matrix& m);

// Eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.
// Input must satisfy max|S - S^T| < 1e-10.
std::vector<double> sym_eigen(const Matrix& s);

struct SymEigResult {
  std::vector<double> values;  // ascending
  Matrix vectors;              // columns are the matching eigenvectors
};
SymEigResult sym_eigen_full(const Matrix& s);

struct AdamHyper {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam, row-lazy: each row carries its own moments and step
// count, so sparse row updates stay O(touched rows). Dense tensors simply
// step every row.
class AdamState {
 public:
  AdamState() = default;
  AdamState(std::size_t rows, std::size_t cols, AdamHyper hyper = {});

  void step(Matrix& params, const Matrix& grads);
  void step_row(Matrix& params, std::size_t row, std::span<const double> grad);

  const AdamHyper& hyper() const { return hyper_; }
  std::int64_t row_steps(std::size_t row) const { return t_[row]; }

 private:
  Matrix m_;
  Matrix v_;
  std::vector<std::int64_t> t_;
  AdamHyper hyper_;
};

}  // namespace xliso
