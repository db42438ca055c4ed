// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>

#include "holzyg/frame.hpp"

using namespace holzyg;

TEST_CASE("regular two-scale identity entries for the hat scheme") {
  // mask {1/2, 1, 1/2}: M has 1/2 on even diagonal entries, 3/4 on odd ones,
  // -1/4 on the first off-diagonal and -1/8 between odd neighbours
  Scheme s = build_dd(Mesh(1.0, 1.0), 1);
  FrameSystem f = build_frame_eigsqrt(s, 24);
  CHECK(uep_target_entry(f, 0, 0) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(uep_target_entry(f, 1, 1) == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(uep_target_entry(f, 0, 1) == doctest::Approx(-0.25).epsilon(1e-13));
  CHECK(uep_target_entry(f, 1, 3) == doctest::Approx(-0.125).epsilon(1e-13));
  CHECK(uep_target_entry(f, 0, 2) == doctest::Approx(0.0).epsilon(1e-13));
  // the windowed square root reproduces M on the interior
  CHECK(f.uep_residual < 1e-11);
}

TEST_CASE("banded frames on the 1:2 mesh") {
  for (int L : {1, 2, 3}) {
    CAPTURE(L);
    Scheme s = build_dd(Mesh(1.0, 2.0), L);
    FrameSystem f = build_frame(s, 0);
    CHECK(f.uep_residual < 1e-11);
    CHECK(f.v_measured >= L);
    // moments up to L-1 vanish across the whole line, including the middle
    for (int n = 0; n < L; ++n) CHECK(f.moment_table[static_cast<std::size_t>(n)] < 1e-6);
    // the L-th moment does not (otherwise the bound would not be sharp)
    CHECK(f.moment_table[static_cast<std::size_t>(L)] > 1e-4);
  }
}

TEST_CASE("recombined weights keep the regular tails") {
  Scheme s = build_dd(Mesh(1.0, 2.0), 3);
  FrameSystem f = build_frame(s, 0);
  CHECK(f.d(-40) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.d(40) == doctest::Approx(2.0).epsilon(1e-12));
  // moment centering: normalized moments sit on mesh powers everywhere
  for (std::int64_t k = -12; k <= 12; ++k) {
    CHECK(f.moments[1](k) ==
          doctest::Approx(s.mesh.point(k) * f.d(k)).epsilon(1e-9).scale(1.0));
    CHECK(f.moments[2](k) ==
          doctest::Approx(s.mesh.point(k) * s.mesh.point(k) * f.d(k)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("framelet supports scale like 2^-j by construction") {
  Scheme s = build_dd(Mesh(1.0, 2.0), 2);
  FrameSystem f = build_frame(s, 0);
  double c_supp = 0.0;
  for (const auto& fam : f.tails) {
    auto sup = f.column_support(f.tail_column(fam, fam.i_cut + 4 * fam.dir));
    c_supp = std::max(c_supp, sup.second - sup.first);
  }
  for (const auto& col : f.middle) {
    auto sup = f.column_support(col);
    c_supp = std::max(c_supp, sup.second - sup.first);
  }
  CHECK(c_supp > 0.0);
  CHECK(c_supp < 40.0);  // compactly supported, desk-scale widths
}

TEST_CASE("eigsqrt construction loses vanishing moments at the irregular point") {
  Scheme s = build_dd(Mesh(1.0, 2.0), 3);
  FrameSystem f = build_frame_eigsqrt(s, 40);
  CHECK(f.uep_residual < 1e-10);
  CHECK(f.v_measured == 1);  // first moments stay O(0.1) near the origin
  CHECK(f.moment_table[1] > 1e-3);
}
