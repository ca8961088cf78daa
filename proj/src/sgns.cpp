#include "xliso/sgns.hpp"

#include <cmath>
#include <stdexcept>

namespace xliso {

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

std::span<double> SparseRowGrad::row(int id) {
  auto it = pos_.find(id);
  if (it == pos_.end()) {
    const std::size_t slot = ids_.size();
    ids_.push_back(id);
    pos_.emplace(id, slot);
    buf_.resize(buf_.size() + dim_, 0.0);
    return {buf_.data() + slot * dim_, dim_};
  }
  return {buf_.data() + it->second * dim_, dim_};
}

double sgns_accumulate(SgnsBatchGrad& acc, int center, int context,
                       std::span<const int> negatives, const Matrix& in_vecs,
                       const Matrix& out_vecs) {
  if (negatives.empty())
    throw std::invalid_argument("sgns: empty negatives list");
  if (in_vecs.cols() != out_vecs.cols())
    throw std::invalid_argument("sgns: table dimension mismatch");
  const auto bad = [&](int id, const Matrix& t) {
    return id < 0 || static_cast<std::size_t>(id) >= t.rows();
  };
  if (bad(center, in_vecs) || bad(context, out_vecs))
    throw std::invalid_argument("sgns: row id out of range");
  for (int n : negatives)
    if (bad(n, out_vecs)) throw std::invalid_argument("sgns: row id out of range");

  if (acc.grad_in.dim() != in_vecs.cols()) {
    acc.grad_in.reset(in_vecs.cols());
    acc.grad_out.reset(out_vecs.cols());
  }

  const auto ctr = in_vecs.row(static_cast<std::size_t>(center));
  auto g_ctr = acc.grad_in.row(center);

  const auto ctx = out_vecs.row(static_cast<std::size_t>(context));
  const double d_pos = dot(ctx, ctr);
  double loss = -log_sigmoid(d_pos);
  // d(-log s(x))/dx = s(x) - 1
  const double g_pos = sigmoid(d_pos) - 1.0;
  axpy(g_pos, ctx, g_ctr);
  axpy(g_pos, ctr, acc.grad_out.row(context));

  for (int neg : negatives) {
    const auto nrow = out_vecs.row(static_cast<std::size_t>(neg));
    const double d_neg = dot(nrow, ctr);
    loss -= log_sigmoid(-d_neg);
    // d(-log s(-x))/dx = s(x)
    const double g_neg = sigmoid(d_neg);
    axpy(g_neg, nrow, g_ctr);
    axpy(g_neg, ctr, acc.grad_out.row(neg));
  }

  acc.loss += loss;
  return loss;
}

SgnsBatchGrad sgns_loss_grad(int center, int context,
                             std::span<const int> negatives,
                             const Matrix& in_vecs, const Matrix& out_vecs) {
  SgnsBatchGrad acc;
  acc.grad_in.reset(in_vecs.cols());
  acc.grad_out.reset(out_vecs.cols());
  sgns_accumulate(acc, center, context, negatives, in_vecs, out_vecs);
  return acc;
}

}  // namespace xliso
