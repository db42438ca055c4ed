// SPDX-License-Identifier: Apache-2.0
#include "holzyg/slanted_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "holzyg/errors.hpp"

namespace holzyg {

namespace {

// Trims leading/trailing zeros so tail detection compares canonical forms.
Mask trimmed(Mask m) {
  auto is_zero = [&](std::size_t j) {
    if (m.has_exact()) return m.exact[j].is_zero();
    return m.values[j] == 0.0;
  };
  std::size_t lo = 0, hi = m.values.size();
  while (lo < hi && is_zero(lo)) ++lo;
  while (hi > lo && is_zero(hi - 1)) --hi;
  Mask out;
  out.anchor = m.anchor + static_cast<std::int64_t>(lo);
  out.values.assign(m.values.begin() + lo, m.values.begin() + hi);
  if (m.has_exact()) out.exact.assign(m.exact.begin() + lo, m.exact.begin() + hi);
  return out;
}

bool same_shifted(const Mask& a, const Mask& b, std::int64_t row_shift) {
  if (a.values.size() != b.values.size()) return false;
  if (a.anchor + row_shift != b.anchor) return false;
  if (a.has_exact() && b.has_exact()) return a.exact == b.exact;
  constexpr double kTol = 1e-13;
  double scale = 0.0;
  for (double v : a.values) scale = std::max(scale, std::abs(v));
  for (std::size_t j = 0; j < a.values.size(); ++j)
    if (std::abs(a.values[j] - b.values[j]) > kTol * std::max(1.0, scale)) return false;
  return true;
}

}  // namespace

SlantedMatrix::SlantedMatrix(int slant, int period, std::int64_t k_left, std::int64_t k_right,
                             std::vector<Mask> left_masks, std::vector<Mask> right_masks,
                             std::vector<Mask> irregular_columns)
    : slant_(slant),
      period_(period),
      k_left_(k_left),
      k_right_(k_right),
      left_masks_(std::move(left_masks)),
      right_masks_(std::move(right_masks)),
      irregular_(std::move(irregular_columns)) {
  if (period_ < 1 || slant_ < 1) throw ValidationError("slanted matrix needs slant,period >= 1");
  if (static_cast<int>(left_masks_.size()) != period_ ||
      static_cast<int>(right_masks_.size()) != period_)
    throw ValidationError("slanted matrix needs one tail mask per period and side");
  if (k_right_ < k_left_) throw ValidationError("k_right must not precede k_left");
  std::int64_t gap = k_right_ == k_left_ ? 0 : k_right_ - k_left_ - 1;
  if (gap != static_cast<std::int64_t>(irregular_.size()))
    throw ValidationError("irregular column count does not match k_left/k_right");
}

SlantedMatrix SlantedMatrix::identity() {
  Mask m;
  m.anchor = 0;
  m.values = {1.0};
  m.exact = {Rational(1)};
  return SlantedMatrix(1, 1, 0, 0, {m}, {m}, {});
}

SlantedMatrix SlantedMatrix::from_columns(int slant, std::int64_t k_lo, std::vector<Mask> columns) {
  if (columns.size() < 5) throw ValidationError("need more columns to detect tails");
  for (auto& c : columns) c = trimmed(c);
  std::int64_t n = static_cast<std::int64_t>(columns.size());
  // Maximal run from the left end where successive columns are slant-shifts.
  std::int64_t left_run = 1;
  while (left_run < n && same_shifted(columns[left_run - 1], columns[left_run], slant)) ++left_run;
  std::int64_t right_run = 1;
  while (right_run < n &&
         same_shifted(columns[n - right_run - 1], columns[n - right_run], slant))
    ++right_run;
  if (left_run < 2 || right_run < 2)
    throw NumericalError("column range too small to expose periodic tails");
  std::int64_t k_left = k_lo + left_run - 1;
  std::int64_t k_right = k_lo + n - right_run;
  if (k_right < k_left) {  // fully shift-invariant: both tails share one column
    k_left = k_lo + n / 2;
    k_right = k_left;
  }
  Mask left = columns[k_left - k_lo];
  Mask right = columns[k_right - k_lo];
  std::vector<Mask> irregular;
  if (k_right > k_left + 1)
    irregular.assign(columns.begin() + (k_left - k_lo) + 1, columns.begin() + (k_right - k_lo));
  return SlantedMatrix(slant, 1, k_left, k_right, {left}, {right}, std::move(irregular));
}

bool SlantedMatrix::has_exact() const {
  auto all = [](const std::vector<Mask>& ms) {
    for (const auto& m : ms)
      if (!m.has_exact() && !m.values.empty()) return false;
    return true;
  };
  return overrides_.empty() && all(left_masks_) && all(right_masks_) && all(irregular_);
}

double SlantedMatrix::entry(std::int64_t i, std::int64_t k) const {
  if (!overrides_.empty()) {
    auto it = overrides_.find({i, k});
    if (it != overrides_.end()) return it->second;
  }
  auto view = column_view(k);
  std::int64_t j = i - view.row0;
  if (j < 0 || j >= static_cast<std::int64_t>(view.values.size())) return 0.0;
  return view.values[static_cast<std::size_t>(j)];
}

std::optional<Rational> SlantedMatrix::entry_exact(std::int64_t i, std::int64_t k) const {
  const Mask* m = nullptr;
  std::int64_t row0 = 0;
  if (k <= k_left_) {
    std::int64_t c = (k_left_ - k) % period_;
    std::int64_t t = (k_left_ - c - k) / period_;
    m = &left_masks_[static_cast<std::size_t>(c)];
    row0 = m->anchor - slant_ * t;
  } else if (k >= k_right_) {
    std::int64_t c = (k - k_right_) % period_;
    std::int64_t t = (k - c - k_right_) / period_;
    m = &right_masks_[static_cast<std::size_t>(c)];
    row0 = m->anchor + slant_ * t;
  } else {
    m = &irregular_[static_cast<std::size_t>(k - k_left_ - 1)];
    row0 = m->anchor;
  }
  std::int64_t j = i - row0;
  if (j < 0 || j >= static_cast<std::int64_t>(m->values.size())) return Rational(0);
  if (!m->has_exact()) return std::nullopt;
  return m->exact[static_cast<std::size_t>(j)];
}

SlantedMatrix::ColumnView SlantedMatrix::column_view(std::int64_t k) const {
  if (k <= k_left_) {
    std::int64_t c = (k_left_ - k) % period_;
    std::int64_t t = (k_left_ - c - k) / period_;
    const Mask& m = left_masks_[static_cast<std::size_t>(c)];
    return {m.anchor - slant_ * t, std::span<const double>(m.values)};
  }
  if (k >= k_right_) {
    std::int64_t c = (k - k_right_) % period_;
    std::int64_t t = (k - c - k_right_) / period_;
    const Mask& m = right_masks_[static_cast<std::size_t>(c)];
    return {m.anchor + slant_ * t, std::span<const double>(m.values)};
  }
  const Mask& m = irregular_[static_cast<std::size_t>(k - k_left_ - 1)];
  return {m.anchor, std::span<const double>(m.values)};
}

std::pair<std::int64_t, std::int64_t> SlantedMatrix::column_rows(std::int64_t k) const {
  auto view = column_view(k);
  return {view.row0, view.row0 + static_cast<std::int64_t>(view.values.size())};
}

Mask SlantedMatrix::column(std::int64_t k) const {
  auto view = column_view(k);
  Mask out;
  out.anchor = view.row0;
  out.values.assign(view.values.begin(), view.values.end());
  if (auto ex = entry_exact(view.row0, k); ex.has_value()) {
    out.exact.resize(out.values.size());
    for (std::size_t j = 0; j < out.values.size(); ++j)
      out.exact[j] = *entry_exact(view.row0 + static_cast<std::int64_t>(j), k);
  }
  if (!overrides_.empty()) {
    for (const auto& [key, value] : overrides_) {
      if (key.second != k) continue;
      std::int64_t j = key.first - out.anchor;
      if (j < 0 || j >= static_cast<std::int64_t>(out.values.size()))
        throw ValidationError("override outside stored column support");
      out.values[static_cast<std::size_t>(j)] = value;
      out.exact.clear();
    }
  }
  return out;
}

std::int64_t SlantedMatrix::max_support() const {
  std::int64_t m = 0;
  for (const auto& v : left_masks_) m = std::max<std::int64_t>(m, v.values.size());
  for (const auto& v : right_masks_) m = std::max<std::int64_t>(m, v.values.size());
  for (const auto& v : irregular_) m = std::max<std::int64_t>(m, v.values.size());
  return m;
}

std::pair<std::int64_t, std::int64_t> SlantedMatrix::columns_touching_rows(std::int64_t r0,
                                                                           std::int64_t r1) const {
  // Walk outward from the irregular zone until column supports clear the rows.
  std::int64_t lo = k_left_;
  while (column_rows(lo).second > r0) --lo;
  std::int64_t hi = k_right_;
  while (column_rows(hi).first < r1) ++hi;
  // Tighten inward.
  while (lo < hi && column_rows(lo).second <= r0) ++lo;
  while (hi > lo && column_rows(hi).first >= r1) --hi;
  return {lo, hi + 1};
}

void SlantedMatrix::add_override(std::int64_t i, std::int64_t k, double value) {
  overrides_[{i, k}] = value;
}

Window window(const SlantedMatrix& a, std::int64_t row0, std::int64_t row1, std::int64_t col0,
              std::int64_t col1) {
  if (row1 < row0 || col1 < col0) throw ValidationError("empty window range");
  Window w;
  w.row0 = row0;
  w.col0 = col0;
  w.values = Eigen::MatrixXd::Zero(row1 - row0, col1 - col0);
  for (std::int64_t k = col0; k < col1; ++k) {
    auto view = a.column_view(k);
    std::int64_t lo = std::max(row0, view.row0);
    std::int64_t hi = std::min(row1, view.row0 + static_cast<std::int64_t>(view.values.size()));
    for (std::int64_t i = lo; i < hi; ++i)
      w.values(i - row0, k - col0) = view.values[static_cast<std::size_t>(i - view.row0)];
  }
  for (const auto& [key, value] : a.overrides()) {
    auto [i, k] = key;
    if (i >= row0 && i < row1 && k >= col0 && k < col1) w.values(i - row0, k - col0) = value;
  }
  return w;
}

Window transpose_apply(const SlantedMatrix& a, const Window& w) {
  auto [c0, c1] = a.columns_touching_rows(w.row0, w.rows_end());
  Window out;
  out.row0 = c0;
  out.col0 = w.col0;
  out.values = Eigen::MatrixXd::Zero(c1 - c0, w.values.cols());
  for (std::int64_t k = c0; k < c1; ++k) {
    auto view = a.column_view(k);
    std::int64_t lo = std::max(w.row0, view.row0);
    std::int64_t hi =
        std::min(w.rows_end(), view.row0 + static_cast<std::int64_t>(view.values.size()));
    for (std::int64_t p = lo; p < hi; ++p) {
      double apk = view.values[static_cast<std::size_t>(p - view.row0)];
      if (apk == 0.0) continue;
      out.values.row(k - c0) += apk * w.values.row(p - w.row0);
    }
  }
  return out;
}

namespace {

// Column k of A*B materialized exactly: sum_p B(p,k) * colA(p).
Mask product_column(const SlantedMatrix& a, const SlantedMatrix& b, std::int64_t k, bool exact) {
  auto [p0, p1] = b.column_rows(k);
  std::int64_t r_lo = 0, r_hi = 0;
  bool first = true;
  for (std::int64_t p = p0; p < p1; ++p) {
    auto [alo, ahi] = a.column_rows(p);
    if (first) {
      r_lo = alo;
      r_hi = ahi;
      first = false;
    } else {
      r_lo = std::min(r_lo, alo);
      r_hi = std::max(r_hi, ahi);
    }
  }
  Mask out;
  out.anchor = r_lo;
  out.values.assign(static_cast<std::size_t>(r_hi - r_lo), 0.0);
  if (exact) out.exact.assign(static_cast<std::size_t>(r_hi - r_lo), Rational(0));
  auto bview = b.column_view(k);
  for (std::int64_t p = p0; p < p1; ++p) {
    double bpk = bview.values[static_cast<std::size_t>(p - bview.row0)];
    auto aview = a.column_view(p);
    for (std::size_t j = 0; j < aview.values.size(); ++j) {
      std::int64_t i = aview.row0 + static_cast<std::int64_t>(j);
      out.values[static_cast<std::size_t>(i - r_lo)] += bpk * aview.values[j];
    }
    if (exact) {
      Rational bex = *b.entry_exact(p, k);
      for (std::size_t j = 0; j < aview.values.size(); ++j) {
        std::int64_t i = aview.row0 + static_cast<std::int64_t>(j);
        out.exact[static_cast<std::size_t>(i - r_lo)] += bex * *a.entry_exact(i, p);
      }
    }
  }
  return out;
}

}  // namespace

SlantedMatrix multiply(const SlantedMatrix& a, const SlantedMatrix& b) {
  if (a.period() != 1 || b.period() != 1)
    throw ValidationError("multiply supports period-1 slanted matrices");
  if (!a.overrides().empty() || !b.overrides().empty())
    throw ValidationError("multiply does not support entry overrides");
  // Product columns become pure tails once the factor column's support lies
  // fully inside the other factor's tail zone; walk outward until then, with
  // a couple of extra columns so tail detection sees the pattern.
  std::int64_t kl = std::min(a.k_left(), b.k_left());
  while (b.column_rows(kl).second - 1 > a.k_left()) --kl;
  kl -= 2;
  std::int64_t kr = std::max(a.k_right(), b.k_right());
  while (b.column_rows(kr).first < a.k_right()) ++kr;
  kr += 2;

  bool exact = a.has_exact() && b.has_exact();
  std::vector<Mask> cols;
  cols.reserve(static_cast<std::size_t>(kr - kl + 1));
  try {
    for (std::int64_t k = kl; k <= kr; ++k) cols.push_back(product_column(a, b, k, exact));
  } catch (const RationalOverflow&) {
    cols.clear();
    for (std::int64_t k = kl; k <= kr; ++k) cols.push_back(product_column(a, b, k, false));
  }
  return SlantedMatrix::from_columns(a.slant() * b.slant(), kl, std::move(cols));
}

void apply_columns(const SlantedMatrix& a, std::int64_t v_first, std::span<const double> v,
                   std::int64_t& out_first, std::vector<double>& out) {
  std::int64_t k0 = v_first;
  std::int64_t k1 = v_first + static_cast<std::int64_t>(v.size());
  std::int64_t r_lo = a.column_rows(k0).first;
  std::int64_t r_hi = a.column_rows(k1 - 1).second;
  // Supports of interior columns stay within the envelope of the end columns
  // for slant >= 1; widen by the largest support to be safe.
  std::int64_t pad = a.max_support();
  r_lo -= pad;
  r_hi += pad;
  out.assign(static_cast<std::size_t>(r_hi - r_lo), 0.0);
  out_first = r_lo;
  for (std::int64_t k = k0; k < k1; ++k) {
    double vk = v[static_cast<std::size_t>(k - k0)];
    if (vk == 0.0) continue;
    auto view = a.column_view(k);
    double* dst = out.data() + (view.row0 - r_lo);
    for (std::size_t j = 0; j < view.values.size(); ++j) dst[j] += vk * view.values[j];
  }
}

}  // namespace holzyg
