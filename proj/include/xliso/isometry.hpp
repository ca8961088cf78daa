#pragma once

#include <utility>

#include "xliso/matrix.hpp"

namespace xliso {

struct IsometryReport {
  double es = 0.0;          // eigenvector similarity, lower = more isomorphic
  double pearson_rho = 0.0; // higher = more isomorphic
  int r_used = 0;           // retained eigenvalue count
  int k_nn = 0;             // neighbors used for the graphs
};

// Laplacian-spectrum distance between the cosine k-NN graphs of the two seed
// row sets: L = D - A on the union-symmetrized unweighted graphs, eigenvalues
// ascending, r = min over both spaces of the largest prefix summing to less
// than 90% of the spectrum, es = sum of squared eigenvalue differences over
// that prefix. Returns (es, r).
std::pair<double, int> eigenvector_similarity(const Matrix& x_seed,
                                              const Matrix& y_seed, int k);

// Pearson correlation of the two pairwise-cosine lists (i < j, same order on
// both sides). Requires s >= 3 and non-constant lists.
double pearson_seed_correlation(const Matrix& x_seed, const Matrix& y_seed);

IsometryReport isometry_report(const Matrix& x_seed, const Matrix& y_seed,
                               int k);

// Exposed for tests: adjacency of the union-symmetrized cosine k-NN graph.
Matrix knn_adjacency(const Matrix& rows, int k);

}  // namespace xliso
