// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "holzyg/gramian.hpp"
#include "oracles.hpp"

using namespace holzyg;

TEST_CASE("regular gramian of hats on the unit mesh") {
  Scheme hats = build_dd(Mesh(1.0, 1.0), 1);
  Mask m = hats.Z.left_masks()[0];
  m.anchor -= 2 * hats.Z.k_left();
  RegularGramian a = regular_gramian(m, m);
  CHECK(a.at(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(a.at(1) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(a.at(-1) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(a.at(2) == 0.0);
}

TEST_CASE("cross gramian row sums equal the analyzed integrals") {
  Scheme zs = build_dd(Mesh(1.0, 2.0), 2);
  Scheme ps = build_dd(Mesh(1.0, 2.0), 3);
  CrossGramian g = cross_gramian(zs, ps);
  CHECK(g.row_sum_residual() < 1e-10);
  CHECK(g.fixpoint_residual() < 1e-11);
  // left-regular rows integrate to h_l = 1, right-regular to h_r = 2
  double left_sum = 0.0, right_sum = 0.0;
  for (std::int64_t k = -40; k <= 40; ++k) {
    left_sum += g.entry(-20, k);
    right_sum += g.entry(20, k);
  }
  CHECK(left_sum == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(right_sum == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("cross gramian matches the level-12 quadrature oracle") {
  Scheme zs = build_bspline(Mesh(1.0, 2.0), 2);
  Scheme ps = build_dd(Mesh(1.0, 2.0), 3);
  CrossGramian g = cross_gramian(zs, ps);
  const int J = 12;
  for (std::int64_t i : {-4, -2, -1, 0, 2}) {
    LimitSamples zi = limit_values(zs, i, J);
    for (std::int64_t k = i - 6; k <= i + 9; ++k) {
      LimitSamples pk = limit_values(ps, k, J);
      double oracle = oracles::trapezoid_inner(zs.mesh, zi, pk);
      CHECK(g.entry(i, k) == doctest::Approx(oracle).epsilon(1e-4).scale(1.0));
    }
  }
}

TEST_CASE("self gramian is symmetric positive semidefinite on windows") {
  Scheme zs = build_dd(Mesh(1.0, 2.0), 2);
  CrossGramian g = cross_gramian(zs, zs);
  const std::int64_t lo = -8, hi = 8;
  Eigen::MatrixXd block(hi - lo + 1, hi - lo + 1);
  for (std::int64_t i = lo; i <= hi; ++i)
    for (std::int64_t k = lo; k <= hi; ++k) block(i - lo, k - lo) = g.entry(i, k);
  CHECK((block - block.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("cross gramian entries are stable under window enlargement") {
  Scheme zs = build_dd(Mesh(1.0, 2.0), 2);
  Scheme ps = build_dd(Mesh(1.0, 2.0), 3);
  CrossGramian small = cross_gramian(zs, ps, 0, 0, 3);
  CrossGramian big = cross_gramian(zs, ps, -6, 6, 8);
  for (std::int64_t i = -10; i <= 10; ++i)
    for (std::int64_t k = -14; k <= 14; ++k)
      CHECK(small.entry(i, k) == doctest::Approx(big.entry(i, k)).epsilon(1e-13).scale(1.0));
}
