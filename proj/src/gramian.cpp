// SPDX-License-Identifier: Apache-2.0
#include "holzyg/gramian.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "holzyg/errors.hpp"

namespace holzyg {

RegularGramian regular_gramian(const Mask& analyzed_mask, const Mask& frame_mask) {
  const std::int64_t az = analyzed_mask.anchor;
  const std::int64_t bz = az + static_cast<std::int64_t>(analyzed_mask.values.size()) - 1;
  const std::int64_t aw = frame_mask.anchor;
  const std::int64_t bw = aw + static_cast<std::int64_t>(frame_mask.values.size()) - 1;
  // supports [az,bz] and [s+aw, s+bw] overlap on a set of positive measure
  const std::int64_t s_min = az - bw + 1;
  const std::int64_t s_max = bz - aw - 1;
  const std::int64_t n = s_max - s_min + 1;
  if (n <= 0) throw ValidationError("masks with disjoint supports");

  // a(s) = 1/2 sum_{p,q} z(p) w(q) a(2s + q - p)
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (std::int64_t s = s_min; s <= s_max; ++s)
    for (std::int64_t p = az; p <= bz; ++p) {
      double z = analyzed_mask.values[static_cast<std::size_t>(p - az)];
      if (z == 0.0) continue;
      for (std::int64_t sp = s_min; sp <= s_max; ++sp) {
        std::int64_t q = sp - 2 * s + p;
        if (q < aw || q > bw) continue;
        T(s - s_min, sp - s_min) += 0.5 * z * frame_mask.values[static_cast<std::size_t>(q - aw)];
      }
    }

  Eigen::EigenSolver<Eigen::MatrixXd> es(T);
  Eigen::Index best = 0;
  double best_dist = 1e300;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
    double dist = std::abs(es.eigenvalues()(j) - std::complex<double>(1.0, 0.0));
    if (dist < best_dist) {
      best_dist = dist;
      best = j;
    }
  }
  if (best_dist > 1e-8)
    throw NumericalError("transition operator has no eigenvalue 1 (distance " +
                         std::to_string(best_dist) + ")");
  Eigen::VectorXd a = es.eigenvectors().col(best).real();
  double sum = a.sum();
  if (std::abs(sum) < 1e-12) throw NumericalError("degenerate gramian eigenvector");
  a /= sum;  // sum_s a(s) = integral of zeta_0 = 1 on the unit mesh

  RegularGramian out;
  out.s_min = s_min;
  out.values.assign(a.data(), a.data() + n);
  return out;
}

namespace {

Mask base_offsets(const SlantedMatrix& m, bool left) {
  // Tail mask re-anchored to column-0 row offsets.
  Mask out = left ? m.left_masks()[0] : m.right_masks()[0];
  std::int64_t base = left ? m.k_left() : m.k_right();
  out.anchor -= 2 * base;
  return out;
}

}  // namespace

double CrossGramian::entry(std::int64_t i, std::int64_t k) const {
  if (i >= row_lo_ && i <= row_hi_) {
    if (k < col_lo_ || k > col_hi_) return 0.0;
    return block_(i - row_lo_, k - col_lo_);
  }
  if (i < row_lo_) return analyzed_.mesh.h_left() * left_.at(k - i);
  return analyzed_.mesh.h_right() * right_.at(k - i);
}

CrossGramian cross_gramian(const Scheme& zs, const Scheme& ps, std::int64_t rows_lo,
                           std::int64_t rows_hi, int margin) {
  if (!(zs.mesh == ps.mesh)) throw ValidationError("schemes must share one mesh");
  CrossGramian g;
  g.analyzed_ = zs;
  g.frame_ = ps;
  g.d_analyzed_ = integral_weights(zs);
  g.left_ = regular_gramian(base_offsets(zs.Z, true), base_offsets(ps.Z, true));
  g.right_ = regular_gramian(base_offsets(zs.Z, false), base_offsets(ps.Z, false));

  const std::int64_t s_lo = std::min(g.left_.s_min, g.right_.s_min);
  const std::int64_t s_hi = std::max(g.left_.s_max(), g.right_.s_max());

  for (int attempt = 0; attempt < 2; ++attempt) {
    int pad = margin << attempt;
    // A row is a pure tail row iff the analyzed function is a tail translate
    // and every overlapping frame function is one too.
    std::int64_t row_lo =
        std::min({zs.Z.k_left(), ps.Z.k_left() - s_hi, rows_lo}) - pad;
    std::int64_t row_hi =
        std::max({zs.Z.k_right(), ps.Z.k_right() - s_lo, rows_hi}) + pad;
    std::int64_t col_lo = row_lo + s_lo - 1;
    std::int64_t col_hi = row_hi + s_hi + 1;

    const std::int64_t nr = row_hi - row_lo + 1;
    const std::int64_t nc = col_hi - col_lo + 1;
    const std::int64_t n = nr * nc;
    auto idx = [&](std::int64_t i, std::int64_t k) { return (i - row_lo) * nc + (k - col_lo); };

    g.row_lo_ = row_lo;
    g.row_hi_ = row_hi;
    g.col_lo_ = col_lo;
    g.col_hi_ = col_hi;
    g.block_ = Eigen::MatrixXd::Zero(nr, nc);  // so entry() serves tails during assembly

    auto tail_entry = [&](std::int64_t i, std::int64_t k) -> double {
      if (i < row_lo) return zs.mesh.h_left() * g.left_.at(k - i);
      return zs.mesh.h_right() * g.right_.at(k - i);
    };

    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (std::int64_t i = row_lo; i <= row_hi; ++i) {
      auto [p0, p1] = zs.Z.column_rows(i);
      for (std::int64_t k = col_lo; k <= col_hi; ++k) {
        auto [q0, q1] = ps.Z.column_rows(k);
        for (std::int64_t p = p0; p < p1; ++p) {
          double zf = zs.Z.entry(p, i);
          if (zf == 0.0) continue;
          for (std::int64_t q = q0; q < q1; ++q) {
            double wf = ps.Z.entry(q, k);
            if (wf == 0.0) continue;
            double c = 0.5 * zf * wf;
            bool inside = p >= row_lo && p <= row_hi && q >= col_lo && q <= col_hi;
            if (inside)
              A(idx(i, k), idx(p, q)) -= c;
            else if (p < row_lo || p > row_hi)
              b(idx(i, k)) += c * tail_entry(p, q);
            // q outside the column range with p inside: no support overlap
          }
        }
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd x = lu.solve(b);
    if ((A * x - b).cwiseAbs().maxCoeff() > 1e-10) {
      if (attempt == 1)
        throw NumericalError(
            "cross-gramian system is rank deficient after window growth; "
            "eigenvalue 1 of the transition map appears not to be simple");
      continue;
    }
    for (std::int64_t i = row_lo; i <= row_hi; ++i)
      for (std::int64_t k = col_lo; k <= col_hi; ++k) g.block_(i - row_lo, k - col_lo) = x(idx(i, k));

    // Residual of the fixed point evaluated one row beyond the solved block,
    // which exercises the tail consistency as well.
    double res = 0.0;
    for (std::int64_t i = row_lo - 1; i <= row_hi + 1; ++i) {
      auto [p0, p1] = zs.Z.column_rows(i);
      for (std::int64_t k = col_lo - 1; k <= col_hi + 1; ++k) {
        auto [q0, q1] = ps.Z.column_rows(k);
        double acc = 0.0;
        for (std::int64_t p = p0; p < p1; ++p) {
          double zf = zs.Z.entry(p, i);
          if (zf == 0.0) continue;
          for (std::int64_t q = q0; q < q1; ++q) acc += 0.5 * zf * ps.Z.entry(q, k) * g.entry(p, q);
        }
        res = std::max(res, std::abs(acc - g.entry(i, k)));
      }
    }
    g.fixpoint_residual_ = res;

    double rs = 0.0;
    for (std::int64_t i = row_lo; i <= row_hi; ++i) {
      double sum = 0.0;
      for (std::int64_t k = col_lo; k <= col_hi; ++k) sum += g.entry(i, k);
      rs = std::max(rs, std::abs(sum - g.d_analyzed_(i)));
    }
    g.row_sum_residual_ = rs;
    if (res > 1e-11 && attempt == 0) continue;
    return g;
  }
  throw NumericalError("cross-gramian did not stabilize");
}

}  // namespace holzyg
