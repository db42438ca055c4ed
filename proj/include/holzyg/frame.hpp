// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "holzyg/gramian.hpp"
#include "holzyg/limits.hpp"
#include "holzyg/scheme.hpp"

namespace holzyg {

/// One explicitly stored framelet coefficient column over the function
/// indices: psi = 2^(1/2) sum_p values[p - row0] phi_p(2x) / sqrt(d_p).
struct FrameletColumn {
  std::int64_t row0 = 0;
  std::vector<double> values;
};

/// Shift family of framelet columns on one regular tail: the column at coarse
/// shift i (dir*i >= dir*i_cut) has mask `mask` anchored at row0_base + 2*i.
struct TailFamily {
  int dir = -1;  // -1 left, +1 right
  std::int64_t i_cut = 0;
  std::int64_t row0_base = 0;
  std::vector<double> mask;
};

/// Wavelet tight frame over a semi-regular interpolatory scheme.
///
/// The framelets satisfy the weighted two-scale Parseval identity
///   Q Q^T = S - (1/2) Phat^T S Phat,        Phat = D^(-1/2) W^T D^(1/2),
/// where S = I + F is a symmetric positive definite weight differing from the
/// identity only on a finite block near the irregular point. F is chosen so
/// that S maps the renormalized moment vectors mu_n / sqrt(d) onto the pure
/// mesh-power vectors sqrt(d) t^n (n < L), which gives every framelet L
/// vanishing moments, and so that the right-hand side stays positive
/// semidefinite. On regular meshes the moments are already pure and S = I;
/// then the identity reduces to the plain unitary extension principle.
///
/// The coarse layer of the frame is theta_m = sum_k T(k,m) phi_k / sqrt(d_k)
/// with T T^T = S; T also differs from the identity only on the block.
struct FrameSystem {
  Scheme scheme;
  WeightVector d;                     // integrals of the basic limit functions
  std::vector<WeightVector> moments;  // mu_n for n = 0..L

  std::int64_t s_lo = 0;   // block offset; block size = F.rows()
  Eigen::MatrixXd F;       // S - I on the block
  Eigen::MatrixXd T_blk;   // T - I on the block

  std::vector<TailFamily> tails;
  std::vector<FrameletColumn> middle;

  int v_declared = 0;
  int v_measured = 0;
  double s_metadata = 0.0;
  double uep_residual = 0.0;         // two-scale identity residual
  std::vector<double> moment_table;  // max |int x^n psi| over framelets
  std::string method = "banded";

  // cached supports of the scheme's functions, for column_support()
  std::int64_t sup_lo = 0, sup_hi = -1;
  std::vector<double> sup_left, sup_right;
  std::int64_t sup_a_off = 0, sup_b_off = 0;

  double S_entry(std::int64_t p, std::int64_t q) const;
  /// y = D^(-1/2) q: pairs a framelet column with rows of the cross-Gramian.
  FrameletColumn analysis_vector(const FrameletColumn& q) const;
  FrameletColumn tail_column(const TailFamily& fam, std::int64_t i) const;
  std::pair<double, double> column_support(const FrameletColumn& q) const;
};

/// Compactly supported construction: spectral factorization of the regular
/// mask symbol on the tails plus a positive semidefinite completion of the
/// irregular middle under the weighted two-scale identity.
FrameSystem build_frame(const Scheme& s, int v_target);

/// The plain windowed symmetric-eigen-square-root of I - (1/2) Phat^T Phat.
/// Works on regular meshes; on semi-regular meshes that matrix is indefinite
/// for L >= 2 and this construction fails with a hard error.
FrameSystem build_frame_eigsqrt(const Scheme& s, std::int64_t half_width = 40);

/// Entry of the two-scale target A = S - (1/2) Phat^T S Phat.
double two_scale_target(const FrameSystem& f, std::int64_t p, std::int64_t q);

/// max |A - Q Q^T| over [lo,hi]^2.
double uep_residual_on(const FrameSystem& f, std::int64_t lo, std::int64_t hi);

/// Moment of one framelet column: int x^n psi = 2^(-n-1/2) sum_p q(p) mu_n(p)/sqrt(d_p).
double framelet_moment(const FrameSystem& f, const FrameletColumn& q, int n);

/// Known regular-mask smoothness exponents per family; 0 when unknown.
double default_smoothness(const Scheme& s);

}  // namespace holzyg
