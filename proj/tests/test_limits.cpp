// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>

#include "holzyg/limits.hpp"
#include "holzyg/scheme.hpp"
#include "oracles.hpp"

using namespace holzyg;

TEST_CASE("cascade of interpolatory delta data hits deltas at knots") {
  Scheme s = build_dd(Mesh(1.0, 2.0), 2);
  LimitSamples f = cascade_eval(s, 0, 5);
  for (std::int64_t k = -4; k <= 4; ++k) {
    std::int64_t p = k << 5;  // original knot t(k) at level 5
    CHECK(f.value_at(p) == doctest::Approx(k == 0 ? 1.0 : 0.0).epsilon(1e-14));
  }
}

TEST_CASE("partition of unity at every level") {
  for (auto family : {0, 1}) {
    Scheme s = family == 0 ? build_dd(Mesh(1.0, 2.0), 2) : build_bspline(Mesh(1.0, 2.0), 2);
    int J = 6;
    std::int64_t lo = -40, hi = 40;
    std::vector<double> sum(static_cast<std::size_t>((hi - lo) << J) + 1, 0.0);
    for (std::int64_t i = lo - 10; i <= hi + 10; ++i) {
      LimitSamples f = cascade_eval(s, i, J);
      for (std::int64_t p = f.first; p <= f.last(); ++p) {
        std::int64_t idx = p - (lo << J);
        if (idx >= 0 && idx < static_cast<std::int64_t>(sum.size()))
          sum[static_cast<std::size_t>(idx)] += f.value_at(p);
      }
    }
    // check well inside the covered range
    std::int64_t margin = 15LL << J;
    for (std::size_t j = static_cast<std::size_t>(margin);
         j + static_cast<std::size_t>(margin) < sum.size(); ++j)
      CHECK(std::abs(sum[j] - 1.0) < 1e-12);
  }
}

TEST_CASE("bspline limit values match the closed-form spline oracle") {
  Scheme s = build_bspline(Mesh(1.0, 2.0), 2);
  int J = 6;
  for (std::int64_t i : {-5, -2, -1, 0, 3}) {
    LimitSamples f = limit_values(s, i, J);
    for (std::int64_t p = f.first; p <= f.last(); ++p) {
      double x = f.abscissa(s.mesh, p);
      double oracle = oracles::bspline_basis(s.mesh, 2, i, x);
      CHECK(f.value_at(p) == doctest::Approx(oracle).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("refinement consistency for interpolatory cascades") {
  Scheme s = build_dd(Mesh(1.0, 2.0), 2);
  LimitSamples f5 = cascade_eval(s, -1, 5);
  LimitSamples f6 = cascade_eval(s, -1, 6);
  for (std::int64_t p = f5.first; p <= f5.last(); ++p)
    CHECK(f6.value_at(2 * p) == doctest::Approx(f5.value_at(p)).epsilon(1e-14));
}

TEST_CASE("support intervals") {
  SUBCASE("quadratic bspline spans four consecutive knots") {
    Scheme s = build_bspline(Mesh(1.0, 2.0), 2);
    for (std::int64_t i : {-6, -2, -1, 2}) {
      SupportInterval sup = support(s, i);
      CHECK(sup.left_index == i);
      CHECK(sup.right_index == i + 3);
    }
  }
  SUBCASE("four point scheme spans t(i-3)..t(i+3)") {
    Scheme s = build_dd(Mesh(1.0, 2.0), 2);
    for (std::int64_t i : {-5, -1, 0, 4}) {
      SupportInterval sup = support(s, i);
      CHECK(sup.left_index == i - 3);
      CHECK(sup.right_index == i + 3);
    }
  }
  SUBCASE("far right supports shift by h_r per index") {
    Scheme s = build_dd(Mesh(1.0, 2.0), 2);
    SupportInterval a = support(s, 20);
    SupportInterval b = support(s, 21);
    CHECK(b.left - a.left == doctest::Approx(2.0));
    CHECK(b.right - a.right == doctest::Approx(2.0));
  }
  SUBCASE("cascade samples stay inside the support") {
    Scheme s = build_dd(Mesh(1.0, 2.0), 2);
    for (std::int64_t i : {-2, 0, 1}) {
      SupportInterval sup = support(s, i);
      LimitSamples f = cascade_eval(s, i, 6);
      for (std::int64_t p = f.first; p <= f.last(); ++p)
        if (f.value_at(p) != 0.0) {
          double x = f.abscissa(s.mesh, p);
          CHECK(x >= sup.left - 1e-12);
          CHECK(x <= sup.right + 1e-12);
        }
    }
  }
}

TEST_CASE("trapezoid inner products") {
  SUBCASE("hat against hat on the unit mesh") {
    Scheme s = build_dd(Mesh(1.0, 1.0), 1);  // linear interpolation = hats
    LimitSamples f = limit_values(s, 0, 12);
    CHECK(quad_inner(s.mesh, f, f) == doctest::Approx(2.0 / 3.0).epsilon(1e-5));
  }
  SUBCASE("disjoint supports give zero") {
    Scheme s = build_dd(Mesh(1.0, 2.0), 2);
    LimitSamples f = cascade_eval(s, -10, 6);
    LimitSamples g = cascade_eval(s, 10, 6);
    CHECK(quad_inner(s.mesh, f, g) == 0.0);
  }
  SUBCASE("level mismatch is rejected") {
    Scheme s = build_dd(Mesh(1.0, 2.0), 2);
    LimitSamples f = cascade_eval(s, 0, 4);
    LimitSamples g = cascade_eval(s, 0, 5);
    CHECK_THROWS_AS((void)quad_inner(s.mesh, f, g), ValidationError);
  }
}

TEST_CASE("integral weights") {
  SUBCASE("interpolatory tails carry the local spacing") {
    for (int L : {1, 2, 3}) {
      Scheme s = build_dd(Mesh(1.0, 2.0), L);
      WeightVector d = integral_weights(s);
      CHECK(d(-30) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(d(30) == doctest::Approx(2.0).epsilon(1e-12));
      // quadrature oracle on a regular column
      LimitSamples f = limit_values(s, 12, 12);
      CHECK(moment(s.mesh, f, 0) == doctest::Approx(d(12)).epsilon(1e-5));
    }
  }
  SUBCASE("bspline weights match the knot-difference closed form") {
    Scheme s = build_bspline(Mesh(1.0, 2.0), 2);
    WeightVector d = integral_weights(s);
    for (std::int64_t k = -8; k <= 8; ++k)
      CHECK(d(k) == doctest::Approx((s.mesh.point(k + 3) - s.mesh.point(k)) / 3.0).epsilon(1e-11));
  }
  SUBCASE("quadrature cross-check at the irregular columns") {
    Scheme s = build_dd(Mesh(1.0, 2.0), 2);
    WeightVector d = integral_weights(s);
    for (std::int64_t k : {-2, -1, 0, 1, 2}) {
      LimitSamples f = cascade_eval(s, k, 12);
      CHECK(moment(s.mesh, f, 0) == doctest::Approx(d(k)).epsilon(1e-5));
    }
  }
}

TEST_CASE("moment weights and the loss of purity at the irregular point") {
  // Normalized moments of the interpolatory families coincide with mesh
  // powers on the regular tails but generally NOT across the irregular
  // point; the frame builder's moment-centering step exists because of this.
  SUBCASE("hat centroids leave the nodes at the irregular point") {
    Scheme s = build_dd(Mesh(1.0, 2.0), 1);
    WeightVector mu1 = moment_weights(s, 1);
    // centroid of the middle hat: (t(-1)+t(0)+t(1))/3 = 1/3, times d(0) = 3/2
    CHECK(mu1(0) == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("regular tails are pure for the six point scheme") {
    Scheme s = build_dd(Mesh(1.0, 2.0), 3);
    WeightVector d = integral_weights(s);
    for (int n : {1, 2}) {
      WeightVector mu = moment_weights(s, n);
      for (std::int64_t k : {-20, -15, 15, 20}) {
        double expect = std::pow(s.mesh.point(k), n) * d(k);
        CHECK(mu(k) == doctest::Approx(expect).epsilon(1e-9));
      }
    }
  }
  SUBCASE("the middle first moment of the six point scheme is off-node") {
    Scheme s = build_dd(Mesh(1.0, 2.0), 3);
    WeightVector mu = moment_weights(s, 1);
    CHECK(std::abs(mu(0)) > 0.3);  // t(0) d(0) would be 0
    // independent quadrature confirmation
    LimitSamples f = cascade_eval(s, 0, 12);
    CHECK(moment(s.mesh, f, 1) == doctest::Approx(mu(0)).epsilon(2e-4));
  }
}

TEST_CASE("divergence detection refuses a bad tension parameter") {
  // four-point scheme with tension w: mask {-w, 0, 1/2+w, 1, 1/2+w, 0, -w};
  // far outside the convergence region the difference scheme blows up.
  double w = 0.9;
  std::vector<Mask> cols;
  for (std::int64_t k = -12; k <= 12; ++k) {
    Mask m;
    m.anchor = 2 * k - 3;
    m.values = {-w, 0.0, 0.5 + w, 1.0, 0.5 + w, 0.0, -w};
    cols.push_back(m);
  }
  Scheme s;
  s.mesh = Mesh(1.0, 1.0);
  s.Z = SlantedMatrix::from_columns(2, -12, cols);
  s.interpolatory = true;
  s.family = SchemeFamily::dd;
  CHECK(divergence_radius(s) > 1.0);
  CHECK_THROWS_AS((void)cascade_eval(s, 0, 3), DivergentSchemeError);
  Scheme good = build_dd(Mesh(1.0, 2.0), 2);
  CHECK(divergence_radius(good) < 1.0 + 1e-9);
}
