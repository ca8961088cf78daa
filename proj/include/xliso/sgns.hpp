#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "xliso/matrix.hpp"

namespace xliso {

// Numerically stable sigmoid / log-sigmoid; finite for |x| up to ~700.
double sigmoid(double x);
double log_sigmoid(double x);

// Sparse per-row gradient accumulator with deterministic (insertion) order.
// Rows are stored in one flat buffer strided by dim.
class SparseRowGrad {
 public:
  explicit SparseRowGrad(std::size_t dim = 0) : dim_(dim) {}

  void reset(std::size_t dim) {
    dim_ = dim;
    clear();
  }
  void clear() {
    ids_.clear();
    pos_.clear();
    buf_.clear();
  }

  std::span<double> row(int id);  // find-or-insert, zero-initialized
  std::span<const double> row_at(std::size_t slot) const {
    return {buf_.data() + slot * dim_, dim_};
  }
  std::span<const double> row_of(int id) const {  // id must be present
    return row_at(pos_.at(id));
  }
  const std::vector<int>& ids() const { return ids_; }
  std::size_t dim() const { return dim_; }
  bool has(int id) const { return pos_.count(id) > 0; }

 private:
  std::size_t dim_ = 0;
  std::vector<int> ids_;
  std::unordered_map<int, std::size_t> pos_;
  std::vector<double> buf_;
};

struct SgnsBatchGrad {
  double loss = 0.0;
  SparseRowGrad grad_in;
  SparseRowGrad grad_out;
};

// Adds one (center, context, negatives) term to `acc` and returns the term's
// loss: -[log s(o_ctx . i_ctr) + sum_i log s(-o_neg_i . i_ctr)], with exact
// analytic partials for the touched rows.
double sgns_accumulate(SgnsBatchGrad& acc, int center, int context,
                       std::span<const int> negatives, const Matrix& in_vecs,
                       const Matrix& out_vecs);

SgnsBatchGrad sgns_loss_grad(int center, int context,
                             std::span<const int> negatives,
                             const Matrix& in_vecs, const Matrix& out_vecs);

}  // namespace xliso
