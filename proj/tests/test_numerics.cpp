#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "xliso/numerics.hpp"
#include "support/oracles.hpp"

using namespace xliso;
using xliso::testing::random_matrix;

namespace {

Matrix reconstruct(const SvdResult& r) {
  Matrix us = r.u;
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t j = 0; j < us.cols(); ++j) us(i, j) *= r.sigma[j];
  return matmul_nt(us, r.v);
}

double orthonormality_defect(const Matrix& m) {
  const Matrix g = matmul_tn(m, m);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return worst;
}

}  // namespace

TEST_CASE("svd of simple diagonal inputs") {
  Matrix d(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  const SvdResult r = svd(d);
  CHECK(r.sigma[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.sigma[1] == doctest::Approx(1.0).epsilon(1e-12));

  const SvdResult ri = svd(Matrix::identity(5));
  for (double s : ri.sigma) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("svd cross-checks the symmetric eigensolver on M^T M") {
  Rng rng(17);
  const Matrix m = random_matrix(6, 4, rng);
  const SvdResult r = svd(m);
  const auto eig = sym_eigen(matmul_tn(m, m));  // ascending
  REQUIRE(eig.size() == 4);
  for (int j = 0; j < 4; ++j)
    CHECK(r.sigma[static_cast<std::size_t>(j)] ==
          doctest::Approx(std::sqrt(std::max(0.0, eig[static_cast<std::size_t>(3 - j)])))
              .epsilon(1e-8));
}

TEST_CASE("svd reconstruction and orthonormality over random shapes") {
  Rng rng(23);
  const std::pair<int, int> shapes[] = {{6, 4}, {4, 6}, {5, 5}, {1, 3}, {7, 2}};
  for (auto [a, b] : shapes) {
    const Matrix m = random_matrix(static_cast<std::size_t>(a),
                                   static_cast<std::size_t>(b), rng);
    const SvdResult r = svd(m);
    const Matrix back = reconstruct(r);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        worst = std::max(worst, std::abs(back(i, j) - m(i, j)));
    CHECK(worst < 1e-9 * std::max(1.0, m.max_abs()));
    CHECK(orthonormality_defect(r.u) < 1e-9);
    CHECK(orthonormality_defect(r.v) < 1e-9);
    for (std::size_t j = 0; j + 1 < r.sigma.size(); ++j)
      CHECK(r.sigma[j] >= r.sigma[j + 1]);
  }
}

TEST_CASE("svd handles rank deficiency and the zero matrix") {
  Rng rng(29);
  // Rank-2 6x4 product.
  const Matrix m = matmul(random_matrix(6, 2, rng), random_matrix(2, 4, rng));
  const SvdResult r = svd(m);
  CHECK(r.sigma[2] < 1e-10);
  CHECK(r.sigma[3] < 1e-10);
  const Matrix back = reconstruct(r);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      CHECK(back(i, j) == doctest::Approx(m(i, j)).epsilon(1e-9));
  CHECK(orthonormality_defect(r.u) < 1e-9);

  const SvdResult rz = svd(Matrix(3, 3));
  for (double s : rz.sigma) CHECK(s == 0.0);
  CHECK(orthonormality_defect(rz.u) < 1e-12);
  CHECK(orthonormality_defect(rz.v) < 1e-12);
}

TEST_CASE("sym_eigen: hand oracles") {
  Matrix d(3, 3);
  d(0, 0) = 5.0;
  d(1, 1) = 2.0;
  d(2, 2) = 7.0;
  const auto ed = sym_eigen(d);
  CHECK(ed[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ed[1] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(ed[2] == doctest::Approx(7.0).epsilon(1e-12));

  // [[2,1],[1,2]]: characteristic roots 1 and 3.
  Matrix s(2, 2);
  s(0, 0) = s(1, 1) = 2.0;
  s(0, 1) = s(1, 0) = 1.0;
  const auto es = sym_eigen(s);
  CHECK(std::abs(es[0] - 1.0) < 1e-10);
  CHECK(std::abs(es[1] - 3.0) < 1e-10);

  // Tridiagonal [[2,1,0],[1,2,1],[0,1,2]]: roots 2 - sqrt(2), 2, 2 + sqrt(2).
  Matrix t(3, 3);
  t(0, 0) = t(1, 1) = t(2, 2) = 2.0;
  t(0, 1) = t(1, 0) = t(1, 2) = t(2, 1) = 1.0;
  const auto et = sym_eigen(t);
  CHECK(std::abs(et[0] - (2.0 - std::sqrt(2.0))) < 1e-10);
  CHECK(std::abs(et[1] - 2.0) < 1e-10);
  CHECK(std::abs(et[2] - (2.0 + std::sqrt(2.0))) < 1e-10);
}

TEST_CASE("sym_eigen trace identity and symmetry contract") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix s = random_matrix(5, 5, rng);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i + 1; j < 5; ++j) s(j, i) = s(i, j);
    const auto eig = sym_eigen(s);
    double trace = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < 5; ++i) trace += s(i, i);
    for (double v : eig) sum += v;
    CHECK(std::abs(sum - trace) < 1e-8 * 5);
    for (std::size_t i = 0; i + 1 < eig.size(); ++i) CHECK(eig[i] <= eig[i + 1]);
  }

  Matrix bad(2, 2);
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS(sym_eigen(bad), std::invalid_argument);
}

TEST_CASE("sym_eigen_full reconstructs the matrix") {
  Rng rng(37);
  Matrix s = random_matrix(6, 6, rng);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j) s(j, i) = s(i, j);
  const SymEigResult r = sym_eigen_full(s);
  Matrix vl = r.vectors;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) vl(i, j) *= r.values[j];
  const Matrix back = matmul_nt(vl, r.vectors);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(back(i, j) == doctest::Approx(s(i, j)).epsilon(1e-9));
}

TEST_CASE("graph Laplacians are PSD with a near-zero smallest eigenvalue") {
  Rng rng(41);
  const std::size_t n = 8;
  Matrix adj(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      adj(i, j) = adj(j, i) = rng.uniform01() < 0.4 ? 1.0 : 0.0;
  Matrix lap(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      deg += adj(i, j);
      lap(i, j) = -adj(i, j);
    }
    lap(i, i) = deg;
  }
  const auto eig = sym_eigen(lap);
  CHECK(eig[0] >= -1e-9);
  CHECK(std::abs(eig[0]) < 1e-9);
}

TEST_CASE("adam first step moves by ~lr and zero grad moves nothing") {
  AdamHyper hyper;
  AdamState st(1, 1, hyper);
  Matrix p(1, 1);
  p(0, 0) = 0.3;
  Matrix g(1, 1);
  g(0, 0) = 3.7;
  st.step(p, g);
  CHECK(std::abs(std::abs(0.3 - p(0, 0)) - hyper.lr) < 1e-8);

  AdamState st2(1, 1, hyper);
  Matrix p2(1, 1);
  p2(0, 0) = 0.3;
  Matrix g2(1, 1);
  st2.step(p2, g2);
  CHECK(p2(0, 0) == 0.3);
}

TEST_CASE("adam trajectories are bitwise deterministic") {
  Rng rng(43);
  const Matrix grads[] = {random_matrix(3, 2, rng), random_matrix(3, 2, rng),
                          random_matrix(3, 2, rng)};
  const Matrix init = random_matrix(3, 2, rng);

  Matrix p1 = init, p2 = init;
  AdamState s1(3, 2), s2(3, 2);
  for (const auto& g : grads) {
    s1.step(p1, g);
    s2.step(p2, g);
  }
  CHECK(p1 == p2);
}

TEST_CASE("adam is invariant under parameter-block partitioning") {
  Rng rng(47);
  Matrix joint = random_matrix(4, 3, rng);
  Matrix top(2, 3), bottom(2, 3);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      top(i, j) = joint(i, j);
      bottom(i, j) = joint(i + 2, j);
    }

  AdamState sj(4, 3), st(2, 3), sb(2, 3);
  for (int step = 0; step < 3; ++step) {
    const Matrix g = random_matrix(4, 3, rng);
    Matrix gt(2, 3), gb(2, 3);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        gt(i, j) = g(i, j);
        gb(i, j) = g(i + 2, j);
      }
    sj.step(joint, g);
    st.step(top, gt);
    sb.step(bottom, gb);
  }
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(joint(i, j) == top(i, j));
      CHECK(joint(i + 2, j) == bottom(i, j));
    }
}
