#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace xliso {

// Dense row-major matrix of doubles. Shared by the embedding tables, the
// losses and the linear-algebra kernels; deliberately not a general BLAS.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool all_finite() const;
  double frobenius_norm() const;
  double max_abs() const;

  static Matrix identity(std::size_t n);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);     // a * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // a^T * b
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a * b^T
Matrix transposed(const Matrix& m);

double dot(std::span<const double> u, std::span<const double> v);
double norm2(std::span<const double> u);
void axpy(double a, std::span<const double> x, std::span<double> y);  // y += a*x

// Compensated (Kahan) sum; keeps probability/eigenvalue sums accurate for
// large inputs.
double kahan_sum(std::span<const double> xs);

}  // namespace xliso
