// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>

#include "holzyg/rational.hpp"

namespace holzyg {

/// Semi-regular knot sequence: spacing h_left for k <= 0, h_right for k >= 0,
/// with t(0) = 0 the single irregular point.
class Mesh {
 public:
  Mesh(double h_left, double h_right);
  Mesh(const Rational& h_left, const Rational& h_right);

  double h_left() const { return h_left_; }
  double h_right() const { return h_right_; }

  double point(std::int64_t k) const {
    return k <= 0 ? static_cast<double>(k) * h_left_ : static_cast<double>(k) * h_right_;
  }
  /// t(k+1) - t(k)
  double step(std::int64_t k) const { return k < 0 ? h_left_ : h_right_; }

  bool exact() const { return h_left_exact_.has_value(); }
  Rational h_left_exact() const;
  Rational h_right_exact() const;
  Rational point_exact(std::int64_t k) const;
  Rational step_exact(std::int64_t k) const { return k < 0 ? h_left_exact() : h_right_exact(); }

  /// Mesh with halved spacings; one refinement step maps t onto it.
  Mesh refined() const;

  friend bool operator==(const Mesh& a, const Mesh& b) {
    return a.h_left_ == b.h_left_ && a.h_right_ == b.h_right_;
  }

 private:
  double h_left_;
  double h_right_;
  std::optional<Rational> h_left_exact_;
  std::optional<Rational> h_right_exact_;
};

}  // namespace holzyg
