#include "xliso/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "xliso/numerics.hpp"

namespace xliso {

namespace {

constexpr double kEigenFloor = 1e-10;

void unit_norm_rows(Matrix& m, const std::vector<std::string>& words,
                    const char* stage) {
  std::string offenders;
  int bad = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double norm = norm2(m.row(i));
    if (norm == 0.0) {
      if (bad < 5) offenders += (bad ? ", " : "") + words[i];
      ++bad;
      continue;
    }
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) /= norm;
  }
  if (bad > 0)
    throw std::runtime_error(std::string("normalize: zero-norm rows at ") +
                             stage + " for words: " + offenders);
}

// C^power for a symmetric PSD matrix, eigenvalues clamped at kEigenFloor.
Matrix sym_power(const Matrix& c, double power, int* floored) {
  SymEigResult eig = sym_eigen_full(c);
  const std::size_t d = c.rows();
  Matrix scaled(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    double lambda = eig.values[j];
    if (lambda < kEigenFloor) {
      lambda = kEigenFloor;
      if (floored) ++*floored;
    }
    const double f = std::pow(lambda, power);
    for (std::size_t r = 0; r < d; ++r) scaled(r, j) = eig.vectors(r, j) * f;
  }
  return matmul_nt(scaled, eig.vectors);
}

Matrix gather_rows(const Matrix& m, const std::vector<int>& rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = m.row(static_cast<std::size_t>(rows[i]));
    auto dst = out.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

}  // namespace

EmbeddingMatrix normalize(const EmbeddingMatrix& e) {
  EmbeddingMatrix out = e;
  unit_norm_rows(out.vectors, out.words, "first unit-normalization");

  for (std::size_t j = 0; j < out.vectors.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < out.vectors.rows(); ++i) mean += out.vectors(i, j);
    mean /= static_cast<double>(out.vectors.rows());
    for (std::size_t i = 0; i < out.vectors.rows(); ++i) out.vectors(i, j) -= mean;
  }

  unit_norm_rows(out.vectors, out.words, "second unit-normalization");
  return out;
}

MappingModel fit_mapping(const EmbeddingMatrix& x, const EmbeddingMatrix& y,
                         std::span<const SeedPair> train_pairs,
                         double reweight) {
  if (x.dim() != y.dim())
    throw std::invalid_argument("fit_mapping: dimension mismatch");

  std::vector<int> src_rows, tgt_rows;
  for (const auto& p : train_pairs) {
    const int s = x.lookup(p.source);
    const int t = y.lookup(p.target);
    if (s < 0 || t < 0) continue;
    src_rows.push_back(s);
    tgt_rows.push_back(t);
  }
  if (src_rows.empty())
    throw std::runtime_error("fit_mapping: no usable train pairs");

  const Matrix xs = gather_rows(x.vectors, src_rows);
  const Matrix ys = gather_rows(y.vectors, tgt_rows);
  const double n = static_cast<double>(xs.rows());

  MappingModel model;
  model.seed_pairs_used = static_cast<int>(xs.rows());
  model.reweight_src = model.reweight_tgt = reweight;

  // Seed covariance per space; ZCA whitening with a floor so rank-deficient
  // seed sets stay invertible.
  Matrix cx = matmul_tn(xs, xs);
  Matrix cy = matmul_tn(ys, ys);
  for (std::size_t i = 0; i < cx.rows(); ++i)
    for (std::size_t j = 0; j < cx.cols(); ++j) {
      cx(i, j) /= n;
      cy(i, j) /= n;
    }
  model.whiten_src = sym_power(cx, -0.5, &model.floored_eigenvalues);
  model.whiten_tgt = sym_power(cy, -0.5, &model.floored_eigenvalues);
  model.dewhiten_src = sym_power(cx, 0.5, nullptr);
  model.dewhiten_tgt = sym_power(cy, 0.5, nullptr);

  const Matrix xw = matmul(xs, model.whiten_src);
  const Matrix yw = matmul(ys, model.whiten_tgt);
  SvdResult dec = svd(matmul_tn(xw, yw));
  model.align_src = std::move(dec.u);
  model.align_tgt = std::move(dec.v);
  model.singular = std::move(dec.sigma);

  // Composite per-space transform:
  //   whiten . align . sigma^reweight . align^T . dewhiten . align
  const auto composite = [&](const Matrix& whiten, const Matrix& align,
                             const Matrix& dewhiten) {
    Matrix t = matmul(whiten, align);
    for (std::size_t i = 0; i < t.rows(); ++i)
      for (std::size_t j = 0; j < t.cols(); ++j)
        t(i, j) *= std::pow(model.singular[j], reweight);
    t = matmul_nt(t, align);
    t = matmul(t, dewhiten);
    return matmul(t, align);
  };
  model.transform_src =
      composite(model.whiten_src, model.align_src, model.dewhiten_src);
  model.transform_tgt =
      composite(model.whiten_tgt, model.align_tgt, model.dewhiten_tgt);
  return model;
}

Matrix map_source_rows(const MappingModel& m, const Matrix& rows) {
  return matmul(rows, m.transform_src);
}

Matrix map_target_rows(const MappingModel& m, const Matrix& rows) {
  return matmul(rows, m.transform_tgt);
}

namespace {

// Unit-normalizes rows in place for cosine retrieval; zero rows are left
// zero (they can never win the argmax).
void unit_rows_or_zero(Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double norm = norm2(m.row(i));
    if (norm == 0.0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) /= norm;
  }
}

}  // namespace

std::vector<int> retrieve(const MappingModel& m, const EmbeddingMatrix& x,
                          const EmbeddingMatrix& y, const std::string& query,
                          std::size_t top_k) {
  const int row = x.lookup(query);
  if (row < 0) throw std::runtime_error("retrieve: query '" + query +
                                        "' is out of vocabulary");

  Matrix q(1, x.dim());
  std::copy(x.vectors.row(static_cast<std::size_t>(row)).begin(),
            x.vectors.row(static_cast<std::size_t>(row)).end(), q.row(0).begin());
  Matrix mq = map_source_rows(m, q);
  Matrix my = map_target_rows(m, y.vectors);
  unit_rows_or_zero(mq);
  unit_rows_or_zero(my);

  std::vector<double> scores(my.rows());
  for (std::size_t i = 0; i < my.rows(); ++i) scores[i] = dot(mq.row(0), my.row(i));

  std::vector<int> order(my.rows());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)])
      return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    return a < b;
  });
  if (top_k < order.size()) order.resize(top_k);
  return order;
}

EvalReport precision_at_1(const MappingModel& m, const EmbeddingMatrix& x,
                          const EmbeddingMatrix& y,
                          std::span<const SeedPair> test_pairs) {
  // Gold sets per unique source word, in first-appearance order.
  std::vector<std::string> sources;
  std::unordered_map<std::string, std::vector<int>> gold;
  for (const auto& p : test_pairs) {
    auto [it, inserted] = gold.try_emplace(p.source);
    if (inserted) sources.push_back(p.source);
    const int t = y.lookup(p.target);
    if (t >= 0) it->second.push_back(t);
  }

  Matrix my = map_target_rows(m, y.vectors);
  unit_rows_or_zero(my);

  EvalReport rep;
  rep.seed_pairs_used = m.seed_pairs_used;
  int correct = 0;
  for (const auto& src : sources) {
    const int row = x.lookup(src);
    const auto& golds = gold[src];
    if (row < 0 || golds.empty()) {
      ++rep.skipped_oov;
      continue;
    }
    Matrix q(1, x.dim());
    std::copy(x.vectors.row(static_cast<std::size_t>(row)).begin(),
              x.vectors.row(static_cast<std::size_t>(row)).end(),
              q.row(0).begin());
    Matrix mq = map_source_rows(m, q);
    unit_rows_or_zero(mq);

    int best = 0;
    double best_score = -2.0;
    for (std::size_t i = 0; i < my.rows(); ++i) {
      const double s = dot(mq.row(0), my.row(i));
      if (s > best_score) {
        best_score = s;
        best = static_cast<int>(i);
      }
    }
    ++rep.evaluated;
    if (std::find(golds.begin(), golds.end(), best) != golds.end()) ++correct;
  }
  if (rep.evaluated == 0)
    throw std::runtime_error("precision_at_1: zero evaluable test pairs");
  rep.p_at_1 = static_cast<double>(correct) / static_cast<double>(rep.evaluated);
  return rep;
}

}  // namespace xliso
