// SPDX-License-Identifier: Apache-2.0
#include "holzyg/limits.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "holzyg/errors.hpp"

namespace holzyg {

namespace {

double pow_int(double x, int n) {
  double v = 1.0;
  for (int i = 0; i < n; ++i) v *= x;
  return v;
}

}  // namespace

double WeightVector::operator()(std::int64_t k) const {
  if (k >= lo && k <= hi) return middle[static_cast<std::size_t>(k - lo)];
  double h = k < lo ? mesh.h_left() : mesh.h_right();
  return pow_int(mesh.point(k), tail_power) * h;
}

double divergence_radius(const Scheme& s) {
  const auto& Z = s.Z;
  std::int64_t w = Z.max_support();
  std::int64_t a = Z.k_left() - 2 * w - 2;
  std::int64_t b = Z.k_right() + 2 * w + 2;
  Mesh fine = s.mesh.refined();

  // Difference scheme Z1 with (Delta c)(k) = (c(k+1)-c(k))/(t(k+1)-t(k)):
  // row i of Delta_fine Z has coefficients r_i; summation by parts gives
  // Z1(i,k) = -S_i(k) (t(k+1)-t(k)) with S_i the prefix sums of r_i.
  auto z1_row = [&](std::int64_t i) {
    auto [c0a, c1a] = Z.columns_touching_rows(i, i + 2);
    std::map<std::int64_t, double> row;
    double fine_step = fine.step(i);
    for (std::int64_t k = c0a; k < c1a; ++k) {
      double r = (Z.entry(i + 1, k) - Z.entry(i, k)) / fine_step;
      if (r != 0.0) row[k] = r;
    }
    std::map<std::int64_t, double> out;
    double prefix = 0.0;
    for (auto it = row.begin(); it != row.end(); ++it) {
      prefix += it->second;
      out[it->first] = -prefix * s.mesh.step(it->first);
    }
    return out;
  };

  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(b - a + 1, b - a + 1);
  for (std::int64_t i = a; i <= b; ++i)
    for (const auto& [k, v] : z1_row(i))
      if (k >= a && k <= b) block(i - a, k - a) = v;
  Eigen::EigenSolver<Eigen::MatrixXd> es(block, false);
  double rho = 0.0;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
    rho = std::max(rho, std::abs(es.eigenvalues()(j)));
  return rho;
}

LimitSamples cascade_eval(const Scheme& s, std::int64_t i, int level) {
  if (level < 0) throw ValidationError("cascade level must be >= 0");
  double rho = divergence_radius(s);
  if (rho > 1.0 + 1e-9)
    throw DivergentSchemeError("difference scheme spectral radius " + std::to_string(rho) +
                               " exceeds 1; subdivision does not converge");
  LimitSamples out;
  out.level = level;
  out.first = i;
  out.values = {1.0};
  out.control_polygon = !s.interpolatory;
  std::vector<double> next;
  for (int j = 0; j < level; ++j) {
    std::int64_t next_first = 0;
    apply_columns(s.Z, out.first, out.values, next_first, next);
    out.first = next_first;
    out.values.swap(next);
  }
  // Trim zero padding introduced by the application envelope.
  std::size_t lo = 0, hi = out.values.size();
  while (lo < hi && out.values[lo] == 0.0) ++lo;
  while (hi > lo && out.values[hi - 1] == 0.0) --hi;
  out.first += static_cast<std::int64_t>(lo);
  out.values.assign(out.values.begin() + lo, out.values.begin() + hi);
  return out;
}

namespace {

// de Boor evaluation at the knot tau_q of the spline with control points c on
// the level-`level` knots tau_p = t(p)/2^level.
double deboor_at_knot(const Scheme& s, const LimitSamples& c, std::int64_t q) {
  int d = s.degree;
  double scale = static_cast<double>(std::int64_t(1) << c.level);
  auto knot = [&](std::int64_t p) { return s.mesh.point(p) / scale; };
  double x = knot(q);
  std::vector<double> work(static_cast<std::size_t>(d) + 1);
  for (int i = 0; i <= d; ++i) work[static_cast<std::size_t>(i)] = c.value_at(q - d + i);
  for (int r = 1; r <= d; ++r) {
    for (int i = d; i >= r; --i) {
      std::int64_t left = q - d + i;
      std::int64_t right = q + 1 + i - r;
      double denom = knot(right) - knot(left);
      double alpha = (x - knot(left)) / denom;
      work[static_cast<std::size_t>(i)] = (1.0 - alpha) * work[static_cast<std::size_t>(i - 1)] +
                                          alpha * work[static_cast<std::size_t>(i)];
    }
  }
  return work[static_cast<std::size_t>(d)];
}

}  // namespace

LimitSamples limit_values(const Scheme& s, std::int64_t i, int level) {
  LimitSamples c = cascade_eval(s, i, level);
  if (s.interpolatory) return c;
  if (s.family != SchemeFamily::bspline)
    throw ValidationError("limit_values supports interpolatory and bspline schemes");
  LimitSamples out;
  out.level = level;
  out.first = c.first;
  out.values.assign(c.values.size() + static_cast<std::size_t>(s.degree) + 1, 0.0);
  out.control_polygon = false;
  for (std::size_t j = 0; j < out.values.size(); ++j)
    out.values[j] = deboor_at_knot(s, c, out.first + static_cast<std::int64_t>(j));
  return out;
}

SupportInterval support(const Scheme& s, std::int64_t i) {
  const auto& Z = s.Z;
  std::int64_t kl = Z.k_left();
  std::int64_t kr = Z.k_right();
  // For a regular column with rows [2k+a, 2k+b], supp = [t(k+a), t(k+b)].
  auto pinned = [&](std::int64_t k) {
    auto [r0, r1] = Z.column_rows(k);
    std::int64_t alpha = r0 - 2 * k;
    std::int64_t beta = r1 - 1 - 2 * k;
    return std::pair<double, double>(s.mesh.point(k + alpha), s.mesh.point(k + beta));
  };

  std::map<std::int64_t, std::pair<double, double>> box;
  for (std::int64_t k = kl + 1; k < kr; ++k) box[k] = pinned(k);  // start from a safe box
  auto endpoint = [&](std::int64_t k) -> std::pair<double, double> {
    auto it = box.find(k);
    if (it != box.end()) return it->second;
    return pinned(k);
  };
  for (int iter = 0; iter < 200; ++iter) {
    for (auto& [k, interval] : box) {
      auto [r0, r1] = Z.column_rows(k);
      double lo = 0.0, hi = 0.0;
      bool first = true;
      for (std::int64_t p = r0; p < r1; ++p) {
        if (Z.entry(p, k) == 0.0) continue;
        auto e = endpoint(p);
        if (first) {
          lo = e.first;
          hi = e.second;
          first = false;
        } else {
          lo = std::min(lo, e.first);
          hi = std::max(hi, e.second);
        }
      }
      interval = {lo / 2.0, hi / 2.0};
    }
  }
  auto [lo, hi] = endpoint(i);
  SupportInterval out;
  // Snap outward to mesh indices.
  std::int64_t a = 0;
  while (s.mesh.point(a) > lo + 1e-12) --a;
  while (s.mesh.point(a + 1) <= lo + 1e-12) ++a;
  std::int64_t b = 0;
  while (s.mesh.point(b) < hi - 1e-12) ++b;
  while (s.mesh.point(b - 1) >= hi - 1e-12) --b;
  out.left_index = a;
  out.right_index = b;
  out.left = s.mesh.point(a);
  out.right = s.mesh.point(b);
  return out;
}

double quad_inner(const Mesh& mesh, const LimitSamples& f, const LimitSamples& g) {
  if (f.level != g.level) throw ValidationError("quad_inner requires equal refinement levels");
  double scale = static_cast<double>(std::int64_t(1) << f.level);
  std::int64_t lo = std::max(f.first, g.first);
  std::int64_t hi = std::min(f.last(), g.last());
  double acc = 0.0;
  for (std::int64_t p = lo; p < hi; ++p) {
    double left = f.value_at(p) * g.value_at(p);
    double right = f.value_at(p + 1) * g.value_at(p + 1);
    acc += 0.5 * (left + right) * (mesh.step(p) / scale);
  }
  return acc;
}

double moment(const Mesh& mesh, const LimitSamples& f, int n) {
  if (n < 0) throw ValidationError("moment order must be >= 0");
  double scale = static_cast<double>(std::int64_t(1) << f.level);
  double acc = 0.0;
  for (std::int64_t p = f.first; p < f.last(); ++p) {
    double xl = mesh.point(p) / scale;
    double xr = mesh.point(p + 1) / scale;
    double left = pow_int(xl, n) * f.value_at(p);
    double right = pow_int(xr, n) * f.value_at(p + 1);
    acc += 0.5 * (left + right) * (mesh.step(p) / scale);
  }
  return acc;
}

namespace {

// Shared solver for the pinned-tail eigen systems  M = c Z^T M  with closed
// form tails: unknowns on [-I0, I0], everything outside substituted.
WeightVector solve_weight_system(const Scheme& s, int tail_power, double eig_factor) {
  const auto& Z = s.Z;
  std::int64_t w = Z.max_support();
  std::int64_t reach = std::max(std::llabs(Z.k_left()), std::llabs(Z.k_right()));
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::int64_t I0 = (reach + w + 4) << attempt;
    std::int64_t n = 2 * I0 + 1;
    WeightVector tail;
    tail.mesh = s.mesh;
    tail.tail_power = tail_power;
    tail.lo = 1;
    tail.hi = 0;  // no middle yet: operator() serves tails only
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (std::int64_t i = -I0; i <= I0; ++i) {
      auto [r0, r1] = Z.column_rows(i);
      for (std::int64_t p = r0; p < r1; ++p) {
        double z = Z.entry(p, i);
        if (z == 0.0) continue;
        if (p >= -I0 && p <= I0)
          A(i + I0, p + I0) -= eig_factor * z;
        else
          b(i + I0) += eig_factor * z * tail(p);
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd x = lu.solve(b);
    double residual = (A * x - b).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    if (residual > 1e-11 * scale) continue;  // grow the window and retry
    // Check consistency with the pinned tails at the window edge.
    double edge_err = std::max(std::abs(x(0) - tail(-I0)), std::abs(x(n - 1) - tail(I0)));
    if (edge_err > 1e-9 * scale) continue;
    WeightVector out = tail;
    out.lo = -I0;
    out.hi = I0;
    out.middle.assign(x.data(), x.data() + n);
    return out;
  }
  throw NumericalError("weight eigen-system failed to stabilize after window growth");
}

}  // namespace

WeightVector integral_weights(const Scheme& s) {
  WeightVector d = solve_weight_system(s, 0, 0.5);
  for (double v : d.middle)
    if (!(v > 0.0)) throw NumericalError("integral weights must be positive");
  return d;
}

WeightVector moment_weights(const Scheme& s, int n) {
  if (n == 0) return integral_weights(s);
  if (!s.interpolatory)
    throw ValidationError("moment weights require an interpolatory scheme");
  if (s.family == SchemeFamily::dd && n > 2 * s.L - 1)
    throw ValidationError("moment weights valid only below the reproduction bound");
  return solve_weight_system(s, n, std::pow(2.0, -n - 1));
}

}  // namespace holzyg
