// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "holzyg/limits.hpp"
#include "holzyg/scheme.hpp"

namespace holzyg {

/// Inner products a(s) = <zeta_0, phi_s> of the limit functions of two
/// regular masks on the unit-spacing mesh, from the eigenvector of the
/// transition operator with the normalization sum_s a(s) = 1.
struct RegularGramian {
  std::int64_t s_min = 0;
  std::vector<double> values;

  double at(std::int64_t s) const {
    std::int64_t j = s - s_min;
    return (j < 0 || j >= static_cast<std::int64_t>(values.size()))
               ? 0.0
               : values[static_cast<std::size_t>(j)];
  }
  std::int64_t s_max() const { return s_min + static_cast<std::int64_t>(values.size()) - 1; }
};

/// Masks given as column-0 row offsets (anchor relative to row 0).
RegularGramian regular_gramian(const Mask& analyzed_mask, const Mask& frame_mask);

/// Cross-Gramian G(i,k) = <zeta_i, phi_k> between the limit functions of two
/// schemes on the same mesh: exact fixed point of G = 1/2 Z^T G P with the
/// irregular block solved against pinned regular tails.
class CrossGramian {
 public:
  double entry(std::int64_t i, std::int64_t k) const;

  const Scheme& analyzed() const { return analyzed_; }
  const Scheme& frame() const { return frame_; }
  const WeightVector& analyzed_weights() const { return d_analyzed_; }

  std::int64_t row_lo() const { return row_lo_; }
  std::int64_t row_hi() const { return row_hi_; }
  std::int64_t col_lo() const { return col_lo_; }
  std::int64_t col_hi() const { return col_hi_; }

  /// max |G - 1/2 Z^T G P| over a window one step larger than the solved block
  double fixpoint_residual() const { return fixpoint_residual_; }
  /// max_i |sum_k G(i,k) - d_Z(i)| (partition of unity of the frame family)
  double row_sum_residual() const { return row_sum_residual_; }

  friend CrossGramian cross_gramian(const Scheme& zs, const Scheme& ps, std::int64_t rows_lo,
                                    std::int64_t rows_hi, int margin);

 private:
  Scheme analyzed_;
  Scheme frame_;
  WeightVector d_analyzed_{};
  RegularGramian left_, right_;
  std::int64_t row_lo_ = 0, row_hi_ = -1;
  std::int64_t col_lo_ = 0, col_hi_ = -1;
  Eigen::MatrixXd block_;
  double fixpoint_residual_ = 0.0;
  double row_sum_residual_ = 0.0;
};

/// rows_lo..rows_hi: analyzed rows the caller needs solved explicitly (the
/// accessor serves regular tails for anything outside the block).
CrossGramian cross_gramian(const Scheme& zs, const Scheme& ps, std::int64_t rows_lo = 0,
                           std::int64_t rows_hi = 0, int margin = 3);

}  // namespace holzyg
