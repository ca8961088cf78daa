#pragma once

#include <span>
#include <string>
#include <vector>

#include "xliso/embedding.hpp"
#include "xliso/semantic_graph.hpp"

namespace xliso {

// Unit-norm rows, mean-center columns, unit-norm rows again. Throws listing
// the offending words if any pass produces a zero-norm row.
EmbeddingMatrix normalize(const EmbeddingMatrix& e);

struct MappingModel {
  Matrix whiten_src, whiten_tgt;      // ZCA C^{-1/2} from seed covariance
  Matrix align_src, align_tgt;        // U, V of svd(Xw^T Yw)
  std::vector<double> singular;       // shared singular values
  double reweight_src = 0.5, reweight_tgt = 0.5;
  Matrix dewhiten_src, dewhiten_tgt;  // C^{1/2}
  Matrix transform_src, transform_tgt;  // composite d x d row transforms
  int seed_pairs_used = 0;
  int floored_eigenvalues = 0;  // covariance eigenvalues clamped to the floor
};

// Fits whitening + orthogonal alignment + re-weighting + de-whitening on the
// train-seed rows. Expects normalized inputs (see normalize above).
MappingModel fit_mapping(const EmbeddingMatrix& x, const EmbeddingMatrix& y,
                         std::span<const SeedPair> train_pairs,
                         double reweight = 0.5);

Matrix map_source_rows(const MappingModel& m, const Matrix& rows);
Matrix map_target_rows(const MappingModel& m, const Matrix& rows);

// Target ids ranked by descending cosine in the mapped common space; ties
// break toward the lower id. Throws on an out-of-vocabulary query.
std::vector<int> retrieve(const MappingModel& m, const EmbeddingMatrix& x,
                          const EmbeddingMatrix& y, const std::string& query,
                          std::size_t top_k);

struct EvalReport {
  double p_at_1 = 0.0;
  int evaluated = 0;
  int skipped_oov = 0;
  int seed_pairs_used = 0;
};

// P@1 over unique test source words: a word counts as correct when its
// top-1 retrieved target is one of its gold translations. Source words that
// are out of vocabulary (or whose gold targets all are) are skipped and
// counted. Throws when nothing is evaluable.
EvalReport precision_at_1(const MappingModel& m, const EmbeddingMatrix& x,
                          const EmbeddingMatrix& y,
                          std::span<const SeedPair> test_pairs);

}  // namespace xliso
