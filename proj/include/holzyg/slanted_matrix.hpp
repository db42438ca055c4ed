// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "holzyg/rational.hpp"

namespace holzyg {

/// One stored column (or tail mask): contiguous values starting at row
/// `anchor`. `exact` mirrors `values` when the entries are known rationals.
struct Mask {
  std::int64_t anchor = 0;
  std::vector<double> values;
  std::vector<Rational> exact;

  bool has_exact() const { return !exact.empty(); }
  std::int64_t row_end() const { return anchor + static_cast<std::int64_t>(values.size()); }
};

/// Exact dense block of a bi-infinite matrix.
struct Window {
  std::int64_t row0 = 0;
  std::int64_t col0 = 0;
  Eigen::MatrixXd values;

  double at(std::int64_t i, std::int64_t k) const {
    return values(static_cast<Eigen::Index>(i - row0), static_cast<Eigen::Index>(k - col0));
  }
  std::int64_t rows_end() const { return row0 + values.rows(); }
  std::int64_t cols_end() const { return col0 + values.cols(); }
};

/// Bi-infinite matrix whose columns repeat two periodic tail masks outside a
/// finite irregular range. `slant` is the row shift per period of columns;
/// subdivision matrices have period 1 and slant 2.
///
/// Column lookup, k <= k_left with c = (k_left - k) mod period and
/// t = (k_left - c - k)/period: the column equals left mask c anchored at
/// masks[c].anchor - slant*t. Mirrored on the right. Columns strictly between
/// k_left and k_right are stored explicitly; a sparse override map can pin
/// individual entries on top of the tails (used by imported files only).
class SlantedMatrix {
 public:
  SlantedMatrix() = default;
  SlantedMatrix(int slant, int period, std::int64_t k_left, std::int64_t k_right,
                std::vector<Mask> left_masks, std::vector<Mask> right_masks,
                std::vector<Mask> irregular_columns);

  /// Builds from explicitly materialized columns on [k_lo, k_lo+n): detects the
  /// maximal shift-consistent tails from both ends. Used by scheme builders,
  /// which always materialize well past the irregular zone.
  static SlantedMatrix from_columns(int slant, std::int64_t k_lo, std::vector<Mask> columns);

  static SlantedMatrix identity();

  int slant() const { return slant_; }
  int period() const { return period_; }
  std::int64_t k_left() const { return k_left_; }
  std::int64_t k_right() const { return k_right_; }
  const std::vector<Mask>& left_masks() const { return left_masks_; }
  const std::vector<Mask>& right_masks() const { return right_masks_; }
  const std::vector<Mask>& irregular_columns() const { return irregular_; }

  bool has_exact() const;

  double entry(std::int64_t i, std::int64_t k) const;
  std::optional<Rational> entry_exact(std::int64_t i, std::int64_t k) const;

  /// Row support of column k: [first, last) half-open.
  std::pair<std::int64_t, std::int64_t> column_rows(std::int64_t k) const;
  /// Column k materialized (cheap view for tails is below).
  Mask column(std::int64_t k) const;

  /// Non-allocating view of column k's values (invalid if overrides touch it).
  struct ColumnView {
    std::int64_t row0;
    std::span<const double> values;
  };
  ColumnView column_view(std::int64_t k) const;

  /// Columns whose support intersects the row range [r0, r1).
  std::pair<std::int64_t, std::int64_t> columns_touching_rows(std::int64_t r0, std::int64_t r1) const;

  /// Largest column support length (bounded by construction).
  std::int64_t max_support() const;

  void add_override(std::int64_t i, std::int64_t k, double value);
  const std::map<std::pair<std::int64_t, std::int64_t>, double>& overrides() const {
    return overrides_;
  }

 private:
  int slant_ = 2;
  int period_ = 1;
  std::int64_t k_left_ = 0;
  std::int64_t k_right_ = 0;
  std::vector<Mask> left_masks_;
  std::vector<Mask> right_masks_;
  std::vector<Mask> irregular_;  // columns k_left+1 .. k_right-1 in order
  std::map<std::pair<std::int64_t, std::int64_t>, double> overrides_;
};

/// Exact window of the bi-infinite matrix; entries outside all supports are 0.
Window window(const SlantedMatrix& a, std::int64_t row0, std::int64_t row1, std::int64_t col0,
              std::int64_t col1);

/// Exact window of Aᵀ·W over the full dependency cone: output rows are every
/// column of A receiving mass from W's rows.
Window transpose_apply(const SlantedMatrix& a, const Window& w);

/// Product of two slanted matrices (period 1 both); tails are convolutions of
/// tails, the irregular block stays finite, slants multiply.
SlantedMatrix multiply(const SlantedMatrix& a, const SlantedMatrix& b);

/// out(p) = sum_k A(p,k) v(k) for a finitely supported v starting at v_first.
/// Core kernel of the cascade iteration.
void apply_columns(const SlantedMatrix& a, std::int64_t v_first, std::span<const double> v,
                   std::int64_t& out_first, std::vector<double>& out);

}  // namespace holzyg
