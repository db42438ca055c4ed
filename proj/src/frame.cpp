// SPDX-License-Identifier: Apache-2.0
#include "holzyg/frame.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

#include <Eigen/Eigenvalues>

#include "holzyg/errors.hpp"

namespace holzyg {

namespace {

std::vector<Rational> binomial_row(int n) {
  std::vector<Rational> row(static_cast<std::size_t>(n) + 1, Rational(1));
  for (int j = 1; j <= n; ++j)
    row[static_cast<std::size_t>(j)] =
        row[static_cast<std::size_t>(j - 1)] * Rational(n - j + 1) / Rational(j);
  return row;
}

// Divides a polynomial by (1 - w); the remainder (value at w = 1) must vanish.
std::vector<Rational> divide_by_one_minus_w(const std::vector<Rational>& c) {
  std::vector<Rational> e(c.size() - 1, Rational(0));
  Rational prefix(0);
  for (std::size_t j = 0; j + 1 < c.size(); ++j) {
    prefix += c[j];
    e[j] = prefix;
  }
  if (!(prefix + c.back()).is_zero())
    throw NumericalError("spectral factor division left a remainder");
  return e;
}

std::vector<std::complex<double>> poly_roots(const std::vector<double>& coeffs) {
  int deg = static_cast<int>(coeffs.size()) - 1;
  while (deg > 0 && coeffs[static_cast<std::size_t>(deg)] == 0.0) --deg;
  if (deg <= 0) return {};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i)
    comp(i, deg - 1) = -coeffs[static_cast<std::size_t>(i)] / coeffs[static_cast<std::size_t>(deg)];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<std::complex<double>> roots;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) roots.push_back(es.eigenvalues()(j));
  return roots;
}

struct TailMasks {
  Mask q1, q2, q3;  // anchors relative to coarse shift 0
};

// Spectral factorization of the regular interpolatory mask: three framelet
// masks per coarse shift satisfying the regular two-scale Parseval identity
// sum_g,i q_g(p-2i) q_g(p'-2i) = delta(p,p') - 1/2 sum_i z(p-2i) z(p'-2i).
// q1 alternates the mask itself; q2, q3 come from the spectral factor of
// m(.) m(.+pi) in the doubled angle, with an exact (1-w)^L factor carrying L
// vanishing moments.
TailMasks regular_frame_masks(const Mask& z, int L) {
  if (!z.has_exact()) throw NumericalError("regular mask must be rational");
  const std::int64_t az = z.anchor;
  const std::int64_t bz = az + static_cast<std::int64_t>(z.values.size()) - 1;

  std::map<std::int64_t, Rational> u;  // u_t = sum m_s m_{t-s} (-1)^{t-s}, m = z/2
  for (std::int64_t s = az; s <= bz; ++s)
    for (std::int64_t sp = az; sp <= bz; ++sp) {
      Rational term = z.exact[static_cast<std::size_t>(s - az)] *
                      z.exact[static_cast<std::size_t>(sp - az)] / Rational(4);
      if (sp % 2 != 0) term = -term;
      u[s + sp] += term;
    }
  for (auto& [t, val] : u)
    if (t % 2 != 0 && !val.is_zero())
      throw NumericalError("mask product has odd harmonics; not interpolatory?");
  const std::int64_t R = 2 * L - 1;
  std::vector<Rational> P(static_cast<std::size_t>(2 * R) + 1, Rational(0));
  for (std::int64_t r = -R; r <= R; ++r) {
    auto it = u.find(2 * r);
    if (it != u.end()) P[static_cast<std::size_t>(r + R)] = it->second;
  }
  // P = (-1)^L (1-w)^{2L} Qq with Qq(w) = w^{L-1} S(w), S strictly positive
  std::vector<Rational> Qq = P;
  for (int j = 0; j < 2 * L; ++j) Qq = divide_by_one_minus_w(Qq);
  if (L % 2 != 0)
    for (auto& c : Qq) c = -c;
  if (static_cast<int>(Qq.size()) != 2 * (L - 1) + 1)
    throw NumericalError("unexpected degree after deflation");

  std::vector<double> qq(Qq.size());
  for (std::size_t j = 0; j < Qq.size(); ++j) qq[j] = Qq[j].to_double();
  std::vector<std::complex<double>> inside;
  for (const auto& root : poly_roots(qq)) {
    double mod = std::abs(root);
    if (std::abs(mod - 1.0) < 1e-8)
      throw NumericalError("spectral factor has a root on the unit circle");
    if (mod < 1.0) inside.push_back(root);
  }
  if (static_cast<int>(inside.size()) != L - 1)
    throw NumericalError("unexpected number of roots inside the unit circle");
  std::vector<std::complex<double>> fs = {1.0};
  for (const auto& zr : inside) {
    std::vector<std::complex<double>> next(fs.size() + 1, 0.0);
    for (std::size_t j = 0; j < fs.size(); ++j) {
      next[j + 1] += fs[j];
      next[j] -= zr * fs[j];
    }
    fs = std::move(next);
  }
  double s_at_1 = 0.0;
  for (const auto& c : Qq) s_at_1 += c.to_double();
  std::complex<double> fs_at_1 = 0.0;
  for (const auto& c : fs) fs_at_1 += c;
  if (s_at_1 <= 0.0) throw NumericalError("positive part of the symbol is not positive");
  std::complex<double> scale = std::sqrt(s_at_1) / fs_at_1;
  std::vector<double> f_s(fs.size());
  for (std::size_t j = 0; j < fs.size(); ++j) {
    std::complex<double> v = scale * fs[j];
    if (std::abs(v.imag()) > 1e-10) throw NumericalError("spectral factor is not real");
    f_s[j] = v.real();
  }
  for (std::int64_t r = -(L - 1); r <= L - 1; ++r) {  // verify f_S(w) f_S(1/w) = S
    double acc = 0.0;
    for (std::size_t j = 0; j < f_s.size(); ++j) {
      std::int64_t jj = static_cast<std::int64_t>(j) + r;
      if (jj >= 0 && jj < static_cast<std::int64_t>(f_s.size()))
        acc += f_s[j] * f_s[static_cast<std::size_t>(jj)];
    }
    double want = Qq[static_cast<std::size_t>(r + L - 1)].to_double();
    if (std::abs(acc - want) > 1e-12 * std::max(1.0, std::abs(want)))
      throw NumericalError("spectral factorization failed verification");
  }
  auto binom = binomial_row(L);
  std::vector<double> f(static_cast<std::size_t>(L) + f_s.size(), 0.0);
  for (int j = 0; j <= L; ++j) {
    double b = binom[static_cast<std::size_t>(j)].to_double() * (j % 2 == 0 ? 1.0 : -1.0);
    for (std::size_t i = 0; i < f_s.size(); ++i) f[static_cast<std::size_t>(j) + i] += b * f_s[i];
  }

  TailMasks out;
  out.q1.anchor = az + 1;
  out.q1.values.resize(z.values.size());
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < z.values.size(); ++j) {
    std::int64_t p = az + 1 + static_cast<std::int64_t>(j);
    double sign = ((p - 1) % 2 == 0) ? 1.0 : -1.0;
    out.q1.values[j] = inv_sqrt2 * sign * z.values[j];
  }
  out.q2.anchor = 0;
  out.q3.anchor = 0;
  out.q2.values.assign(2 * f.size(), 0.0);
  out.q3.values.assign(2 * f.size(), 0.0);
  for (std::size_t r = 0; r < f.size(); ++r) {
    out.q2.values[2 * r] = f[r];
    out.q2.values[2 * r + 1] = f[r];
    out.q3.values[2 * r] = f[r];
    out.q3.values[2 * r + 1] = -f[r];
  }
  return out;
}

double pow_int(double x, int n) {
  double v = 1.0;
  for (int i = 0; i < n; ++i) v *= x;
  return v;
}

}  // namespace

double FrameSystem::S_entry(std::int64_t p, std::int64_t q) const {
  double v = (p == q) ? 1.0 : 0.0;
  const std::int64_t K = F.rows();
  if (K > 0 && p >= s_lo && p < s_lo + K && q >= s_lo && q < s_lo + K) v += F(p - s_lo, q - s_lo);
  return v;
}

FrameletColumn FrameSystem::analysis_vector(const FrameletColumn& q) const {
  FrameletColumn y = q;
  for (std::size_t j = 0; j < y.values.size(); ++j)
    y.values[j] /= std::sqrt(d(y.row0 + static_cast<std::int64_t>(j)));
  return y;
}

FrameletColumn FrameSystem::tail_column(const TailFamily& fam, std::int64_t i) const {
  FrameletColumn col;
  col.row0 = fam.row0_base + 2 * i;
  col.values = fam.mask;
  return col;
}

std::pair<double, double> FrameSystem::column_support(const FrameletColumn& q) const {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (std::size_t j = 0; j < q.values.size(); ++j) {
    if (q.values[j] == 0.0) continue;
    std::int64_t p = q.row0 + static_cast<std::int64_t>(j);
    double a, b;
    if (p >= sup_lo && p <= sup_hi) {
      a = sup_left[static_cast<std::size_t>(p - sup_lo)];
      b = sup_right[static_cast<std::size_t>(p - sup_lo)];
    } else {
      a = scheme.mesh.point(p + sup_a_off);
      b = scheme.mesh.point(p + sup_b_off);
    }
    if (first) {
      lo = a;
      hi = b;
      first = false;
    } else {
      lo = std::min(lo, a);
      hi = std::max(hi, b);
    }
  }
  return {lo / 2.0, hi / 2.0};  // framelets live one level finer
}

double framelet_moment(const FrameSystem& f, const FrameletColumn& q, int n) {
  if (n >= static_cast<int>(f.moments.size()))
    throw ValidationError("moment order beyond stored moment vectors");
  double acc = 0.0;
  for (std::size_t j = 0; j < q.values.size(); ++j) {
    std::int64_t p = q.row0 + static_cast<std::int64_t>(j);
    acc += q.values[j] * f.moments[static_cast<std::size_t>(n)](p) / std::sqrt(f.d(p));
  }
  return std::pow(2.0, -n - 0.5) * acc;
}

double two_scale_target(const FrameSystem& f, std::int64_t p, std::int64_t q) {
  const auto& W = f.scheme.Z;
  double acc = f.S_entry(p, q);
  auto [c0p, c1p] = W.columns_touching_rows(p, p + 1);
  auto [c0q, c1q] = W.columns_touching_rows(q, q + 1);
  double w = 0.5 * std::sqrt(f.d(p) * f.d(q));
  for (std::int64_t i = c0p; i < c1p; ++i) {
    double a = W.entry(p, i);
    if (a == 0.0) continue;
    for (std::int64_t m = c0q; m < c1q; ++m) {
      double b = W.entry(q, m);
      if (b == 0.0) continue;
      acc -= w * a * b * f.S_entry(i, m) / std::sqrt(f.d(i) * f.d(m));
    }
  }
  return acc;
}

namespace {

std::int64_t floor_div2(std::int64_t v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

double qqt_entry(const FrameSystem& f, std::int64_t p, std::int64_t q) {
  double acc = 0.0;
  for (const auto& fam : f.tails) {
    std::int64_t len = static_cast<std::int64_t>(fam.mask.size());
    std::int64_t i_lo = floor_div2(std::max(p, q) - fam.row0_base - len + 1) - 1;
    std::int64_t i_hi = floor_div2(std::min(p, q) - fam.row0_base) + 1;
    for (std::int64_t i = i_lo; i <= i_hi; ++i) {
      if (fam.dir < 0 && i > fam.i_cut) continue;
      if (fam.dir > 0 && i < fam.i_cut) continue;
      std::int64_t jp = p - fam.row0_base - 2 * i;
      std::int64_t jq = q - fam.row0_base - 2 * i;
      if (jp < 0 || jp >= len || jq < 0 || jq >= len) continue;
      acc += fam.mask[static_cast<std::size_t>(jp)] * fam.mask[static_cast<std::size_t>(jq)];
    }
  }
  for (const auto& col : f.middle) {
    std::int64_t len = static_cast<std::int64_t>(col.values.size());
    std::int64_t jp = p - col.row0, jq = q - col.row0;
    if (jp < 0 || jp >= len || jq < 0 || jq >= len) continue;
    acc += col.values[static_cast<std::size_t>(jp)] * col.values[static_cast<std::size_t>(jq)];
  }
  return acc;
}

void fill_supports(FrameSystem& f) {
  const Scheme& s = f.scheme;
  auto [r0, r1] = s.Z.column_rows(s.Z.k_left());
  f.sup_a_off = r0 - 2 * s.Z.k_left();
  f.sup_b_off = r1 - 1 - 2 * s.Z.k_left();
  f.sup_lo = s.Z.k_left() - 2;
  f.sup_hi = s.Z.k_right() + 2;
  for (std::int64_t k = f.sup_lo; k <= f.sup_hi; ++k) {
    SupportInterval sup = support(s, k);
    f.sup_left.push_back(sup.left);
    f.sup_right.push_back(sup.right);
  }
}

void measure_moments(FrameSystem& f, int L) {
  std::vector<FrameletColumn> probes;
  for (const auto& fam : f.tails) {
    probes.push_back(f.tail_column(fam, fam.i_cut));
    probes.push_back(f.tail_column(fam, fam.i_cut + fam.dir));
    probes.push_back(f.tail_column(fam, fam.i_cut + 6 * fam.dir));
  }
  for (const auto& col : f.middle) probes.push_back(col);
  f.moment_table.assign(static_cast<std::size_t>(L) + 1, 0.0);
  for (int n = 0; n <= L; ++n)
    for (const auto& q : probes)
      f.moment_table[static_cast<std::size_t>(n)] = std::max(
          f.moment_table[static_cast<std::size_t>(n)], std::abs(framelet_moment(f, q, n)));
  int v = 0;
  while (v <= L && f.moment_table[static_cast<std::size_t>(v)] <= 1e-6) ++v;
  f.v_measured = v;
}

}  // namespace

double uep_residual_on(const FrameSystem& f, std::int64_t lo, std::int64_t hi) {
  double res = 0.0;
  for (std::int64_t p = lo; p <= hi; ++p)
    for (std::int64_t q = p; q <= hi; ++q)
      res = std::max(res, std::abs(two_scale_target(f, p, q) - qqt_entry(f, p, q)));
  return res;
}

double default_smoothness(const Scheme& s) {
  if (s.family == SchemeFamily::dd) {
    if (s.L == 1) return 1.0;
    if (s.L == 2) return 2.0;
    if (s.L == 3) return 2.830;
  }
  return 0.0;
}

FrameSystem build_frame(const Scheme& s, int v_target) {
  if (s.family != SchemeFamily::dd)
    throw ValidationError("frame construction supports the dd family");
  const int L = s.L;
  if (v_target <= 0) v_target = L;
  if (v_target > L)
    throw ValidationError("requested vanishing moments exceed the construction bound L");

  FrameSystem f;
  f.scheme = s;
  f.method = "banded";
  f.v_declared = v_target;
  f.s_metadata = default_smoothness(s);
  f.d = integral_weights(s);
  for (int n = 0; n <= L; ++n) f.moments.push_back(moment_weights(s, n));

  // --- weight block: S (mu_n / sqrt(d)) = sqrt(d) t^n for n < L ---
  // defect vectors g_n are finitely supported because the moments are pure on
  // the regular tails
  std::vector<std::map<std::int64_t, double>> g(static_cast<std::size_t>(L));
  std::int64_t v_lo = 0, v_hi = -1;
  bool any = false;
  for (int n = 0; n < L; ++n)
    for (std::int64_t k = f.d.lo - 3; k <= f.d.hi + 3; ++k) {
      double pure = std::sqrt(f.d(k)) * pow_int(s.mesh.point(k), n);
      double raw = f.moments[static_cast<std::size_t>(n)](k) / std::sqrt(f.d(k));
      double defect = pure - raw;
      if (std::abs(defect) > 1e-11 * std::max(1.0, std::abs(pure))) {
        g[static_cast<std::size_t>(n)][k] = defect;
        if (!any) {
          v_lo = v_hi = k;
          any = true;
        } else {
          v_lo = std::min(v_lo, k);
          v_hi = std::max(v_hi, k);
        }
      }
    }
  std::int64_t K = 0;
  if (any) {
    v_lo -= 4 * L + 10;
    v_hi += 4 * L + 10;
    K = v_hi - v_lo + 1;
  }
  f.s_lo = v_lo;
  f.F = Eigen::MatrixXd::Zero(K, K);

  // tail framelet masks and cuts (needed inside the feasibility loop)
  Mask z0 = s.Z.left_masks()[0];
  z0.anchor -= 2 * s.Z.k_left();
  TailMasks tm = regular_frame_masks(z0, L);
  // the S-correction propagates through one subdivision step
  std::int64_t w_lo = std::min({2 * v_lo - 2 * L, 2 * f.d.lo, 2 * s.Z.k_left()}) - 2;
  std::int64_t w_hi = std::max({2 * v_hi + 2 * L, 2 * f.d.hi, 2 * s.Z.k_right()}) + 2;
  std::int64_t i_cut_l = w_lo / 2 - 2 * L - 2;
  std::int64_t i_cut_r = w_hi / 2 + 2 * L + 2;
  for (const Mask* m : {&tm.q1, &tm.q2, &tm.q3}) {
    TailFamily fam;
    fam.dir = -1;
    fam.i_cut = i_cut_l;
    fam.row0_base = m->anchor;
    fam.mask = m->values;
    f.tails.push_back(fam);
    fam.dir = +1;
    fam.i_cut = i_cut_r;
    f.tails.push_back(fam);
  }
  const std::int64_t PL = 2 * i_cut_l - 4 * L - 2;
  const std::int64_t PR = 2 * i_cut_r + 6 * L + 2;
  const std::int64_t NP = PR - PL + 1;

  Eigen::MatrixXd resid(NP, NP);
  if (K > 0) {
    // Feasibility search for F: alternating projection between the affine
    // moment constraints and the two positive semidefinite conditions
    // (A(F) >= 0 on the completion window, S = I + F >= 0).
    const std::int64_t nv = K * (K + 1) / 2;  // symmetric block, packed upper
    auto pack = [&](std::int64_t a, std::int64_t b) {
      if (a > b) std::swap(a, b);
      return a * K - a * (a - 1) / 2 + (b - a);
    };
    // constraints: sum_q F(p,q) mtilde_n(q) = g_n(p) for p in block, n < L
    std::vector<Eigen::VectorXd> cons;
    std::vector<double> rhs;
    for (int n = 0; n < L; ++n)
      for (std::int64_t p = v_lo; p <= v_hi; ++p) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
        for (std::int64_t q = v_lo; q <= v_hi; ++q)
          c(pack(p - v_lo, q - v_lo)) +=
              f.moments[static_cast<std::size_t>(n)](q) / std::sqrt(f.d(q));
        auto it = g[static_cast<std::size_t>(n)].find(p);
        cons.push_back(c);
        rhs.push_back(it == g[static_cast<std::size_t>(n)].end() ? 0.0 : it->second);
      }
    Eigen::MatrixXd C(static_cast<Eigen::Index>(cons.size()), nv);
    Eigen::VectorXd r(static_cast<Eigen::Index>(cons.size()));
    for (std::size_t j = 0; j < cons.size(); ++j) {
      C.row(static_cast<Eigen::Index>(j)) = cons[j].transpose();
      r(static_cast<Eigen::Index>(j)) = rhs[j];
    }
    // particular least-norm solution and constraint nullspace
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> codC(C);
    Eigen::VectorXd x0 = codC.solve(r);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
    Eigen::Index rank = svd.rank();
    Eigen::MatrixXd N = svd.matrixV().rightCols(svd.matrixV().cols() - rank);

    auto unpackF = [&](const Eigen::VectorXd& x) {
      Eigen::MatrixXd Fm(K, K);
      for (std::int64_t a = 0; a < K; ++a)
        for (std::int64_t b = a; b < K; ++b) {
          Fm(a, b) = x(pack(a, b));
          Fm(b, a) = Fm(a, b);
        }
      return Fm;
    };
    // A(F) is affine: assemble the map column by column. The packed basis
    // element e_ab contributes its embedding minus the subdivision transfer
    // -(1/2) sqrt(d_p d_q / (d_a d_b)) [W(p,a)W(q,b) + W(p,b)W(q,a)].
    const Eigen::Index na = NP * NP, ns = K * K;
    Eigen::MatrixXd Lmat = Eigen::MatrixXd::Zero(na, nv);
    Eigen::MatrixXd Smat = Eigen::MatrixXd::Zero(ns, nv);
    auto a_idx = [&](std::int64_t p, std::int64_t q) { return (q - PL) * NP + (p - PL); };
    for (std::int64_t a = 0; a < K; ++a)
      for (std::int64_t b = a; b < K; ++b) {
        Eigen::Index col = pack(a, b);
        std::int64_t ka = v_lo + a, kb = v_lo + b;
        if (ka >= PL && ka <= PR && kb >= PL && kb <= PR) {
          Lmat(a_idx(ka, kb), col) += 1.0;
          if (a != b) Lmat(a_idx(kb, ka), col) += 1.0;
        }
        Smat(a * K + b, col) += 1.0;
        if (a != b) Smat(b * K + a, col) += 1.0;
        auto [pa0, pa1] = s.Z.column_rows(ka);
        auto [pb0, pb1] = s.Z.column_rows(kb);
        double denom = std::sqrt(f.d(ka) * f.d(kb));
        for (std::int64_t p = pa0; p < pa1; ++p) {
          double wa = s.Z.entry(p, ka);
          if (wa == 0.0 || p < PL || p > PR) continue;
          for (std::int64_t q = pb0; q < pb1; ++q) {
            double wb = s.Z.entry(q, kb);
            if (wb == 0.0 || q < PL || q > PR) continue;
            double c = -0.5 * std::sqrt(f.d(p) * f.d(q)) * wa * wb / denom;
            Lmat(a_idx(p, q), col) += c;
            if (a != b) Lmat(a_idx(q, p), col) += c;
          }
        }
      }
    f.F = unpackF(x0);
    Eigen::VectorXd avec0(na);
    {
      Eigen::MatrixXd A0(NP, NP);
      for (std::int64_t p = PL; p <= PR; ++p)
        for (std::int64_t q = p; q <= PR; ++q) {
          double v = two_scale_target(f, p, q) - qqt_entry(f, p, q);
          A0(p - PL, q - PL) = v;
          A0(q - PL, p - PL) = v;
        }
      avec0 = Eigen::Map<Eigen::VectorXd>(A0.data(), na);
    }
    Eigen::MatrixXd LN = Lmat * N;
    Eigen::MatrixXd SN = Smat * N;
    Eigen::MatrixXd J(na + ns, N.cols());
    J.topRows(na) = LN;
    J.bottomRows(ns) = SN;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qrJ(J);

    // Moment directions are exact kernel vectors of every feasible A; clip
    // everything else to a small positive margin so the alternating
    // projections do not stall tangentially at the cone boundary.
    Eigen::MatrixXd mom_win(NP, L);
    for (int n = 0; n < L; ++n)
      for (std::int64_t p = PL; p <= PR; ++p)
        mom_win(p - PL, n) = f.moments[static_cast<std::size_t>(n)](p) / std::sqrt(f.d(p));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr_mom(mom_win);
    Eigen::MatrixXd Ekernel = qr_mom.householderQ() * Eigen::MatrixXd::Identity(NP, L);

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(N.cols());
    double best = -1e300;
    Eigen::VectorXd best_theta = theta;
    Eigen::MatrixXd S0 = Eigen::MatrixXd::Identity(K, K) + f.F;
    Eigen::VectorXd svec0 = Eigen::Map<Eigen::VectorXd>(S0.data(), ns);
    const double margin = 1e-5;
    for (int iter = 0; iter < 800; ++iter) {
      Eigen::VectorXd avec = avec0 + LN * theta;
      Eigen::VectorXd svec = svec0 + SN * theta;
      Eigen::Map<Eigen::MatrixXd> A(avec.data(), NP, NP);
      Eigen::Map<Eigen::MatrixXd> S(svec.data(), K, K);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(S);
      double a_min = ea.eigenvalues().minCoeff();
      double score = std::min(a_min, es2.eigenvalues().minCoeff());
      if (score > best) {
        best = score;
        best_theta = theta;
      }
      if (a_min >= -1e-12 && es2.eigenvalues().minCoeff() >= 1e-4) break;
      Eigen::VectorXd la = ea.eigenvalues();
      for (Eigen::Index j = 0; j < la.size(); ++j) {
        if (la(j) >= margin) continue;
        double kernel_mass = (Ekernel.transpose() * ea.eigenvectors().col(j)).norm();
        la(j) = kernel_mass > 0.5 ? std::max(la(j), 0.0) : margin;
      }
      Eigen::MatrixXd Ahat = ea.eigenvectors() * la.asDiagonal() * ea.eigenvectors().transpose();
      Eigen::VectorXd ls = es2.eigenvalues().cwiseMax(2e-4);
      Eigen::MatrixXd Shat = es2.eigenvectors() * ls.asDiagonal() * es2.eigenvectors().transpose();
      Eigen::VectorXd target(na + ns);
      target.head(na) = Eigen::Map<Eigen::VectorXd>(Ahat.data(), na) - avec;
      target.tail(ns) = Eigen::Map<Eigen::VectorXd>(Shat.data(), ns) - svec;
      theta += qrJ.solve(target);
    }
    f.F = unpackF(x0 + N * best_theta);
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(K, K) + f.F;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.eigenvalues().minCoeff() < 1e-6)
      throw NumericalError("weight block failed to stay positive definite (min eig " +
                           std::to_string(es.eigenvalues().minCoeff()) + ")");
    // T = sqrt(S), coarse-layer factor
    Eigen::VectorXd sq = es.eigenvalues().cwiseSqrt();
    f.T_blk = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().transpose() -
              Eigen::MatrixXd::Identity(K, K);
  } else {
    f.T_blk = Eigen::MatrixXd::Zero(0, 0);
  }

  for (std::int64_t p = PL; p <= PR; ++p)
    for (std::int64_t q = p; q <= PR; ++q) {
      double v = two_scale_target(f, p, q) - qqt_entry(f, p, q);
      resid(p - PL, q - PL) = v;
      resid(q - PL, p - PL) = v;
    }
  double edge = 0.0;
  for (std::int64_t p = PL; p <= PR; ++p)
    for (std::int64_t q : {PL, PL + 1, PR - 1, PR})
      edge = std::max(edge, std::abs(resid(p - PL, q - PL)));
  if (edge > 1e-10)
    throw NumericalError("completion residual does not vanish at the window edge");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(resid);
  double lambda_max = std::max(1.0, es.eigenvalues().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-9 * lambda_max) {
    Eigen::Index peak;
    es.eigenvectors().col(0).cwiseAbs().maxCoeff(&peak);
    Eigen::MatrixXd mom_dbg(NP, L);
    for (int n = 0; n < L; ++n)
      for (std::int64_t p = PL; p <= PR; ++p)
        mom_dbg(p - PL, n) = f.moments[static_cast<std::size_t>(n)](p) / std::sqrt(f.d(p));
    Eigen::HouseholderQR<Eigen::MatrixXd> qd(mom_dbg);
    Eigen::MatrixXd Ed = qd.householderQ() * Eigen::MatrixXd::Identity(NP, L);
    double mass = (Ed.transpose() * es.eigenvectors().col(0)).norm();
    throw NumericalError("no positive semidefinite completion found (residual min eig " +
                         std::to_string(es.eigenvalues().minCoeff()) + ", eigvec peak at index " +
                         std::to_string(PL + peak) + ", moment-span mass " +
                         std::to_string(mass) + ")");
  }
  Eigen::MatrixXd mom_basis(NP, L);
  for (int n = 0; n < L; ++n)
    for (std::int64_t p = PL; p <= PR; ++p)
      mom_basis(p - PL, n) = f.moments[static_cast<std::size_t>(n)](p) / std::sqrt(f.d(p));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(mom_basis);
  Eigen::MatrixXd Emom = qr.householderQ() * Eigen::MatrixXd::Identity(NP, L);
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
    double lambda = es.eigenvalues()(j);
    if (lambda <= 1e-10) continue;
    Eigen::VectorXd col = es.eigenvectors().col(j) * std::sqrt(lambda);
    col -= Emom * (Emom.transpose() * col);  // exact vanishing moments
    std::int64_t lo = 0, hi = NP - 1;
    double norm = col.cwiseAbs().maxCoeff();
    while (lo < hi && std::abs(col(lo)) < 1e-15 * norm) ++lo;
    while (hi > lo && std::abs(col(hi)) < 1e-15 * norm) --hi;
    FrameletColumn fc;
    fc.row0 = PL + lo;
    fc.values.assign(col.data() + lo, col.data() + hi + 1);
    f.middle.push_back(std::move(fc));
  }

  fill_supports(f);
  f.uep_residual = uep_residual_on(f, PL + 4 * L, PR - 4 * L);
  measure_moments(f, L);
  if (f.v_measured < 1)
    throw NumericalError("constructed frame has no vanishing moment; construction invalid");
  return f;
}

FrameSystem build_frame_eigsqrt(const Scheme& s, std::int64_t half_width) {
  if (s.family != SchemeFamily::dd)
    throw ValidationError("frame construction supports the dd family");
  const int L = s.L;
  FrameSystem f;
  f.scheme = s;
  f.method = "eigsqrt";
  f.v_declared = 1;
  f.s_metadata = default_smoothness(s);
  f.d = integral_weights(s);
  for (int n = 0; n <= L; ++n) f.moments.push_back(moment_weights(s, n));
  f.F = Eigen::MatrixXd::Zero(0, 0);
  f.T_blk = Eigen::MatrixXd::Zero(0, 0);

  const std::int64_t NP = 2 * half_width + 1;
  Eigen::MatrixXd M(NP, NP);
  for (std::int64_t p = -half_width; p <= half_width; ++p)
    for (std::int64_t q = p; q <= half_width; ++q) {
      double v = two_scale_target(f, p, q);
      M(p + half_width, q + half_width) = v;
      M(q + half_width, p + half_width) = v;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw NumericalError(
        "scheme does not admit a tight frame at this normalization (M not PSD, min eig " +
        std::to_string(es.eigenvalues().minCoeff()) + ")");
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
    double lambda = es.eigenvalues()(j);
    if (lambda <= 1e-10) continue;
    Eigen::VectorXd col = es.eigenvectors().col(j) * std::sqrt(lambda);
    FrameletColumn fc;
    fc.row0 = -half_width;
    fc.values.assign(col.data(), col.data() + NP);
    f.middle.push_back(std::move(fc));
  }
  fill_supports(f);
  f.uep_residual = uep_residual_on(f, -half_width / 2, half_width / 2);
  f.moment_table.assign(static_cast<std::size_t>(L) + 1, 0.0);
  for (const auto& col : f.middle) {
    double norm = 0.0, edge = 0.0;
    std::int64_t guard = half_width / 2;
    for (std::size_t j = 0; j < col.values.size(); ++j) {
      norm = std::max(norm, std::abs(col.values[j]));
      if (std::llabs(col.row0 + static_cast<std::int64_t>(j)) > guard)
        edge = std::max(edge, std::abs(col.values[j]));
    }
    if (edge > 1e-12 * norm) continue;  // touched by the window boundary
    for (int n = 0; n <= L; ++n)
      f.moment_table[static_cast<std::size_t>(n)] = std::max(
          f.moment_table[static_cast<std::size_t>(n)], std::abs(framelet_moment(f, col, n)));
  }
  int v = 0;
  while (v <= L && f.moment_table[static_cast<std::size_t>(v)] <= 1e-6) ++v;
  f.v_measured = v;
  return f;
}

}  // namespace holzyg
