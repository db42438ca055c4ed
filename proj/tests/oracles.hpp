// SPDX-License-Identifier: Apache-2.0
//
// Test-only reference implementations, independent of the library's
// computation paths: direct Cox-de Boor evaluation, dense multiplication and
// plain trapezoid sums used to freeze expected values.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "holzyg/limits.hpp"
#include "holzyg/mesh.hpp"

namespace oracles {

/// B-spline basis function N_{i,degree} on the coarse knots t(i)..t(i+degree+1),
/// evaluated by the Cox-de Boor recurrence (no subdivision involved).
inline double bspline_basis(const holzyg::Mesh& mesh, int degree, std::int64_t i, double x) {
  auto t = [&](std::int64_t j) { return mesh.point(j); };
  if (degree == 0) return (x >= t(i) && x < t(i + 1)) ? 1.0 : 0.0;
  double left = 0.0, right = 0.0;
  double dl = t(i + degree) - t(i);
  if (dl > 0.0) left = (x - t(i)) / dl * bspline_basis(mesh, degree - 1, i, x);
  double dr = t(i + degree + 1) - t(i + 1);
  if (dr > 0.0) right = (t(i + degree + 1) - x) / dr * bspline_basis(mesh, degree - 1, i + 1, x);
  return left + right;
}

/// Plain trapezoid inner product of two sampled functions on the level-J mesh;
/// written out here so Gramian tests do not route through the library's
/// quadrature.
inline double trapezoid_inner(const holzyg::Mesh& mesh, const holzyg::LimitSamples& f,
                              const holzyg::LimitSamples& g) {
  double scale = static_cast<double>(std::int64_t(1) << f.level);
  std::int64_t lo = std::max(f.first, g.first);
  std::int64_t hi = std::min(f.last(), g.last());
  double acc = 0.0;
  for (std::int64_t p = lo; p < hi; ++p) {
    double a = f.value_at(p) * g.value_at(p);
    double b = f.value_at(p + 1) * g.value_at(p + 1);
    acc += 0.5 * (a + b) * (mesh.step(p) / scale);
  }
  return acc;
}

}  // namespace oracles
