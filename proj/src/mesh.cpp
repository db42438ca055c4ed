// SPDX-License-Identifier: Apache-2.0
#include "holzyg/mesh.hpp"

namespace holzyg {

namespace {
std::optional<Rational> dyadic_exact(double h) {
  // Every finite double is a dyadic rational; keep the exact form only when it
  // fits comfortably in 64 bits (integers and small fractions like 1/2, 3/4).
  for (std::int64_t den = 1; den <= (1 << 20); den *= 2) {
    double scaled = h * static_cast<double>(den);
    if (scaled == static_cast<double>(static_cast<std::int64_t>(scaled)) &&
        std::abs(scaled) < 9.0e15)
      return Rational(static_cast<std::int64_t>(scaled), den);
  }
  return std::nullopt;
}
}  // namespace

Mesh::Mesh(double h_left, double h_right) : h_left_(h_left), h_right_(h_right) {
  if (!(h_left > 0.0) || !(h_right > 0.0)) throw ValidationError("mesh spacings must be positive");
  auto hl = dyadic_exact(h_left);
  auto hr = dyadic_exact(h_right);
  if (hl && hr) {
    h_left_exact_ = hl;
    h_right_exact_ = hr;
  }
}

Mesh::Mesh(const Rational& h_left, const Rational& h_right)
    : h_left_(h_left.to_double()),
      h_right_(h_right.to_double()),
      h_left_exact_(h_left),
      h_right_exact_(h_right) {
  if (h_left <= Rational(0) || h_right <= Rational(0))
    throw ValidationError("mesh spacings must be positive");
}

Rational Mesh::h_left_exact() const {
  if (!h_left_exact_) throw ValidationError("mesh has no exact rational form");
  return *h_left_exact_;
}

Rational Mesh::h_right_exact() const {
  if (!h_left_exact_) throw ValidationError("mesh has no exact rational form");
  return *h_right_exact_;
}

Rational Mesh::point_exact(std::int64_t k) const {
  return (k <= 0 ? h_left_exact() : h_right_exact()) * Rational(k);
}

Mesh Mesh::refined() const {
  if (exact()) return Mesh(h_left_exact() / Rational(2), h_right_exact() / Rational(2));
  return Mesh(h_left_ / 2.0, h_right_ / 2.0);
}

}  // namespace holzyg
