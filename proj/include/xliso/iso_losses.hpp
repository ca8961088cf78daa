#pragma once

#include <span>

#include "xliso/embedding.hpp"
#include "xliso/matrix.hpp"
#include "xliso/semantic_graph.hpp"

namespace xliso {

// Averaged L2 alignment loss ||Xp - Y||_F / N and its gradient w.r.t. Xp.
// With `squared` the loss is ||Xp - Y||_F^2 / N instead.
std::pair<double, Matrix> l2_loss(const Matrix& xp, const Matrix& y_seed,
                                  bool squared = false);

struct ProcrustesSolution {
  Matrix w_p;       // d x d orthogonal
  double residual;  // ||Xp W_p - Y||_F / N at the solution
};

// Orthogonal minimizer of ||Xp W - Y||_F over W^T W = I, via the SVD of
// Y^T Xp. A zero Xp returns the identity deterministically.
ProcrustesSolution procrustes_solve(const Matrix& xp, const Matrix& y_seed);

// ||Xp W_p - Y||_F / N with W_p recomputed then held constant under
// differentiation (stop-gradient through the SVD).
std::pair<double, Matrix> procrustes_loss(const Matrix& xp,
                                          const Matrix& y_seed,
                                          bool squared = false);

// Copies pretrained target rows onto the source rows of their translations
// for every train pair with both words in vocab; later training updates the
// rows freely. When one source word is paired with several targets the last
// pair in file order wins. Returns the number of rows written.
int init_seeds_from_target(EmbeddingMatrix& x, const EmbeddingMatrix& y_pre,
                           std::span<const SeedPair> train_pairs);

}  // namespace xliso
