// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "holzyg/scheme.hpp"

namespace holzyg {

/// Samples of a basic limit function on the level-J refined mesh t / 2^J.
/// For interpolatory schemes `values` are exact limit values; otherwise they
/// are the level-J control polygon (deviation O(contraction^J)).
struct LimitSamples {
  int level = 0;
  std::int64_t first = 0;
  std::vector<double> values;
  bool control_polygon = false;

  std::int64_t last() const { return first + static_cast<std::int64_t>(values.size()) - 1; }
  double value_at(std::int64_t p) const {
    std::int64_t j = p - first;
    return (j < 0 || j >= static_cast<std::int64_t>(values.size()))
               ? 0.0
               : values[static_cast<std::size_t>(j)];
  }
  double abscissa(const Mesh& mesh, std::int64_t p) const {
    return mesh.point(p) / static_cast<double>(std::int64_t(1) << level);
  }
};

/// J-fold subdivision of delta data at index i. Refuses divergent schemes.
LimitSamples cascade_eval(const Scheme& s, std::int64_t i, int level);

/// Limit values on the level-J mesh: identical to cascade_eval for
/// interpolatory schemes; B-spline control polygons are corrected by local
/// spline evaluation at the knots.
LimitSamples limit_values(const Scheme& s, std::int64_t i, int level);

/// Smallest interval [t(a), t(b)] containing supp(zeta_i), from the fixed
/// point of the support recursion on column supports.
struct SupportInterval {
  std::int64_t left_index = 0;
  std::int64_t right_index = 0;
  double left = 0.0;
  double right = 0.0;
  double width() const { return right - left; }
};

SupportInterval support(const Scheme& s, std::int64_t i);

/// Composite trapezoid of f*g over the common refined mesh; requires equal
/// levels. Error O(2^-J w(2^-J)) for continuous f, g.
double quad_inner(const Mesh& mesh, const LimitSamples& f, const LimitSamples& g);

/// Trapezoid approximation of the n-th moment of f.
double moment(const Mesh& mesh, const LimitSamples& f, int n);

/// Finitely represented bi-infinite weight vector: closed-form tails plus an
/// explicit middle block on [lo, hi].
struct WeightVector {
  Mesh mesh{1.0, 1.0};
  int tail_power = 0;  // tail value = t(k)^tail_power * h_side
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  std::vector<double> middle;

  double operator()(std::int64_t k) const;
  double left_tail() const { return mesh.h_left(); }
  double right_tail() const { return mesh.h_right(); }
};

/// Weights d(k) = integral of zeta_k: the eigenvector Z^T d = 2 d pinned to
/// the regular closed form on the tails. All entries positive.
WeightVector integral_weights(const Scheme& s);

/// n-th moment vector mu_n(k) = integral of x^n zeta_k(x) dx, the eigenvector
/// Z^T mu = 2^(n+1) mu with tails t(k)^n * h. Interpolatory schemes only,
/// valid for n below the reproduction degree bound.
WeightVector moment_weights(const Scheme& s, int n);

/// Spectral radius estimate of the difference scheme's irregular section;
/// values above 1 indicate a divergent scheme.
double divergence_radius(const Scheme& s);

}  // namespace holzyg
