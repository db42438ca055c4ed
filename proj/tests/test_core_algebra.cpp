// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <random>

#include "holzyg/scheme.hpp"
#include "holzyg/slanted_matrix.hpp"

using namespace holzyg;

namespace {

// Dense brute-force oracle: materialize both factors on padded windows and
// multiply, independent of the slanted product path.
Eigen::MatrixXd dense_product_window(const SlantedMatrix& a, const SlantedMatrix& b,
                                     std::int64_t r0, std::int64_t r1, std::int64_t c0,
                                     std::int64_t c1) {
  // rows of A*B in [r0,r1) x cols [c0,c1): intermediate index p covers the
  // supports of B's columns.
  std::int64_t p_lo = b.column_rows(c0).first;
  std::int64_t p_hi = b.column_rows(c1 - 1).second;
  for (std::int64_t k = c0; k < c1; ++k) {
    auto [lo, hi] = b.column_rows(k);
    p_lo = std::min(p_lo, lo);
    p_hi = std::max(p_hi, hi);
  }
  Window wa = window(a, r0, r1, p_lo, p_hi);
  Window wb = window(b, p_lo, p_hi, c0, c1);
  return wa.values * wb.values;
}

SlantedMatrix random_banded(int slant, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Mask> cols;
  Mask tail_left, tail_right;
  tail_left.anchor = -30 * slant;
  tail_left.values = {dist(rng), dist(rng), dist(rng), dist(rng)};
  tail_right = tail_left;
  for (std::int64_t k = -30; k <= 30; ++k) {
    Mask m;
    m.anchor = slant * k;
    if (k <= -4 || k >= 4) {
      m.values = tail_left.values;
    } else {
      m.values = {dist(rng), dist(rng), dist(rng), dist(rng)};
    }
    cols.push_back(m);
  }
  return SlantedMatrix::from_columns(slant, -30, cols);
}

}  // namespace

TEST_CASE("mesh points on the two-sided grid") {
  Mesh mesh(1.0, 2.0);
  CHECK(mesh.point(0) == 0.0);
  CHECK(mesh.point(-3) == -3.0);
  CHECK(mesh.point(1) == 2.0);
  CHECK(mesh.point_exact(-3) == Rational(-3));
  CHECK(mesh.refined().point(1) == 1.0);
}

TEST_CASE("identity slanted matrix windows") {
  auto id = SlantedMatrix::identity();
  Window w = window(id, -2, 3, -2, 3);
  CHECK(w.values.isApprox(Eigen::MatrixXd::Identity(5, 5)));
}

TEST_CASE("quadratic bspline columns on the 1:2 mesh") {
  Scheme s = build_bspline(Mesh(1.0, 2.0), 2);
  // window rows -6..3, cols -3..0 of the subdivision matrix
  CHECK(*s.Z.entry_exact(-6, -3) == Rational(1, 4));
  CHECK(*s.Z.entry_exact(-5, -3) == Rational(3, 4));
  CHECK(*s.Z.entry_exact(-4, -3) == Rational(3, 4));
  CHECK(*s.Z.entry_exact(-3, -3) == Rational(1, 4));
  // irregular column -2 = [1/4, 3/4, 5/6, 1/3] at rows -4..-1
  CHECK(*s.Z.entry_exact(-4, -2) == Rational(1, 4));
  CHECK(*s.Z.entry_exact(-3, -2) == Rational(3, 4));
  CHECK(*s.Z.entry_exact(-2, -2) == Rational(5, 6));
  CHECK(*s.Z.entry_exact(-1, -2) == Rational(1, 3));
  // irregular column -1 = [1/6, 2/3, 3/4, 1/4] at rows -2..1
  CHECK(*s.Z.entry_exact(-2, -1) == Rational(1, 6));
  CHECK(*s.Z.entry_exact(-1, -1) == Rational(2, 3));
  CHECK(*s.Z.entry_exact(0, -1) == Rational(3, 4));
  CHECK(*s.Z.entry_exact(1, -1) == Rational(1, 4));
  // column 0 is already right-regular
  CHECK(*s.Z.entry_exact(0, 0) == Rational(1, 4));
  CHECK(*s.Z.entry_exact(3, 0) == Rational(1, 4));
  CHECK(s.Z.k_left() == -3);
  CHECK(s.Z.k_right() == 0);
}

TEST_CASE("regular mesh degenerates to one shifted mask") {
  Scheme s = build_bspline(Mesh(1.0, 1.0), 2);
  for (std::int64_t k = -5; k <= 5; ++k) {
    CHECK(*s.Z.entry_exact(2 * k + 0, k) == Rational(1, 4));
    CHECK(*s.Z.entry_exact(2 * k + 1, k) == Rational(3, 4));
    CHECK(*s.Z.entry_exact(2 * k + 2, k) == Rational(3, 4));
    CHECK(*s.Z.entry_exact(2 * k + 3, k) == Rational(1, 4));
  }
}

TEST_CASE("four point interpolatory columns on the 1:2 mesh") {
  Scheme s = build_dd(Mesh(1.0, 2.0), 2);
  // regular mask
  CHECK(*s.Z.entry_exact(-9, -3) == Rational(-1, 16));
  CHECK(*s.Z.entry_exact(-7, -3) == Rational(9, 16));
  CHECK(*s.Z.entry_exact(-6, -3) == Rational(1));
  CHECK(*s.Z.entry_exact(-5, -3) == Rational(9, 16));
  CHECK(*s.Z.entry_exact(-3, -3) == Rational(-1, 16));
  // row -1 over columns -2..1
  CHECK(*s.Z.entry_exact(-1, -2) == Rational(-5, 64));
  CHECK(*s.Z.entry_exact(-1, -1) == Rational(5, 8));
  CHECK(*s.Z.entry_exact(-1, 0) == Rational(15, 32));
  CHECK(*s.Z.entry_exact(-1, 1) == Rational(-1, 64));
  // row 1 over columns -1..2
  CHECK(*s.Z.entry_exact(1, -1) == Rational(-1, 5));
  CHECK(*s.Z.entry_exact(1, 0) == Rational(3, 4));
  CHECK(*s.Z.entry_exact(1, 1) == Rational(1, 2));
  CHECK(*s.Z.entry_exact(1, 2) == Rational(-1, 20));
  // window accessor agrees
  Window w = window(s.Z, -1, 0, -2, 2);
  CHECK(w.at(-1, -2) == doctest::Approx(-5.0 / 64).epsilon(1e-15));
  CHECK(w.at(-1, 1) == doctest::Approx(-1.0 / 64).epsilon(1e-15));
}

TEST_CASE("transpose_apply matches the definition") {
  Scheme s = build_bspline(Mesh(1.0, 2.0), 2);
  SUBCASE("identity passes windows through") {
    auto id = SlantedMatrix::identity();
    Window w = window(s.Z, -4, 2, -3, 1);
    Window out = transpose_apply(id, w);
    for (std::int64_t i = -4; i < 2; ++i)
      for (std::int64_t k = -3; k < 1; ++k) CHECK(out.at(i, k) == w.at(i, k));
  }
  SUBCASE("one-hot window picks up a matrix row") {
    // A^T applied to the indicator of row 0 recovers row 0 of A as a column.
    Window one;
    one.row0 = 0;
    one.col0 = 0;
    one.values = Eigen::MatrixXd::Ones(1, 1);
    Window out = transpose_apply(s.Z, one);
    CHECK(out.at(-1, 0) == doctest::Approx(3.0 / 4));
    CHECK(out.at(0, 0) == doctest::Approx(1.0 / 4));
    double sum = out.values.sum();
    CHECK(sum == doctest::Approx(1.0));  // row sums of the subdivision matrix
  }
}

TEST_CASE("slanted product equals dense product on windows") {
  SlantedMatrix a = random_banded(2, 7u);
  SlantedMatrix b = random_banded(2, 13u);
  SlantedMatrix ab = multiply(a, b);
  CHECK(ab.slant() == 4);
  Eigen::MatrixXd oracle = dense_product_window(a, b, -20, 21, -5, 6);
  Window got = window(ab, -20, 21, -5, 6);
  CHECK((oracle - got.values).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("product by identity and row-sum preservation") {
  Scheme s = build_dd(Mesh(1.0, 2.0), 2);
  SlantedMatrix z2 = multiply(s.Z, s.Z);
  SUBCASE("A times identity is A") {
    SlantedMatrix ai = multiply(s.Z, SlantedMatrix::identity());
    for (std::int64_t k = -4; k <= 4; ++k)
      for (std::int64_t i = 2 * k - 4; i <= 2 * k + 4; ++i)
        CHECK(ai.entry(i, k) == doctest::Approx(s.Z.entry(i, k)).epsilon(1e-15));
  }
  SUBCASE("squared scheme keeps unit row sums") {
    for (std::int64_t i = -15; i <= 15; ++i) {
      auto [c0, c1] = z2.columns_touching_rows(i, i + 1);
      double sum = 0.0;
      for (std::int64_t k = c0; k < c1; ++k) sum += z2.entry(i, k);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
  SUBCASE("squared scheme windows equal dense squares") {
    Eigen::MatrixXd oracle = dense_product_window(s.Z, s.Z, -12, 13, -3, 4);
    Window got = window(z2, -12, 13, -3, 4);
    CHECK((oracle - got.values).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("tail consistency of built matrices") {
  Scheme s = build_dd(Mesh(1.0, 2.0), 3);
  const auto& Z = s.Z;
  for (std::int64_t k = Z.k_left() - 6; k < Z.k_left(); ++k) {
    auto [r0, r1] = Z.column_rows(k);
    auto [q0, q1] = Z.column_rows(k + 1);
    CHECK(r0 + 2 == q0);
    CHECK(r1 + 2 == q1);
    for (std::int64_t i = r0; i < r1; ++i) CHECK(Z.entry(i, k) == Z.entry(i + 2, k + 1));
  }
}

TEST_CASE("window stability under enlargement") {
  Scheme s = build_dd(Mesh(1.0, 2.0), 2);
  Window small = window(s.Z, -5, 6, -3, 4);
  Window big = window(s.Z, -20, 21, -10, 11);
  for (std::int64_t i = -5; i < 6; ++i)
    for (std::int64_t k = -3; k < 4; ++k) CHECK(small.at(i, k) == big.at(i, k));
}
