// SPDX-License-Identifier: Apache-2.0
#include "holzyg/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <type_traits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "holzyg/errors.hpp"

namespace holzyg {

std::string family_name(SchemeFamily f) {
  switch (f) {
    case SchemeFamily::bspline: return "bspline";
    case SchemeFamily::dd: return "dd";
    case SchemeFamily::rbf: return "rbf";
  }
  return "?";
}

SchemeFamily family_by_name(const std::string& name) {
  if (name == "bspline") return SchemeFamily::bspline;
  if (name == "dd") return SchemeFamily::dd;
  if (name == "rbf") return SchemeFamily::rbf;
  throw ValidationError("unknown scheme family: " + name);
}

namespace {

std::int64_t floor_div2(std::int64_t p) { return p >= 0 ? p / 2 : -((-p + 1) / 2); }

template <typename T>
T mesh_point(const Mesh& mesh, std::int64_t k) {
  if constexpr (std::is_same_v<T, Rational>)
    return mesh.point_exact(k);
  else
    return mesh.point(k);
}

template <typename T>
Mask make_mask(const std::map<std::int64_t, T>& entries) {
  Mask m;
  if (entries.empty()) return m;
  m.anchor = entries.begin()->first;
  std::int64_t hi = entries.rbegin()->first;
  std::size_t n = static_cast<std::size_t>(hi - m.anchor + 1);
  m.values.assign(n, 0.0);
  if constexpr (std::is_same_v<T, Rational>) m.exact.assign(n, Rational(0));
  for (const auto& [row, val] : entries) {
    std::size_t j = static_cast<std::size_t>(row - m.anchor);
    if constexpr (std::is_same_v<T, Rational>) {
      m.exact[j] = val;
      m.values[j] = val.to_double();
    } else {
      m.values[j] = val;
    }
  }
  return m;
}

// ---- B-spline midpoint knot insertion (Oslo discrete B-splines) ----

template <typename T>
T oslo_alpha(const Mesh& mesh, int degree, std::int64_t p, std::int64_t k) {
  auto coarse = [&](std::int64_t j) { return mesh_point<T>(mesh, j); };
  auto fine = [&](std::int64_t j) { return mesh_point<T>(mesh, j) / T(2); };
  // alpha_1(p, j) over j = k .. k+degree
  std::vector<T> a(static_cast<std::size_t>(degree) + 1, T(0));
  std::int64_t j0 = floor_div2(p);
  if (j0 < k || j0 > k + degree) return T(0);
  a[static_cast<std::size_t>(j0 - k)] = T(1);
  for (int r = 1; r <= degree; ++r) {
    std::vector<T> next(static_cast<std::size_t>(degree - r) + 1, T(0));
    for (std::int64_t idx = 0; idx <= degree - r; ++idx) {
      std::int64_t j = k + idx;
      T w1 = (fine(p + r) - coarse(j)) / (coarse(j + r) - coarse(j));
      T w2 = (coarse(j + r + 1) - fine(p + r)) / (coarse(j + r + 1) - coarse(j + 1));
      next[static_cast<std::size_t>(idx)] =
          w1 * a[static_cast<std::size_t>(idx)] + w2 * a[static_cast<std::size_t>(idx + 1)];
    }
    a = std::move(next);
  }
  return a[0];
}

template <typename T>
std::vector<Mask> bspline_columns(const Mesh& mesh, int degree, std::int64_t k_lo,
                                  std::int64_t k_hi) {
  std::vector<Mask> cols;
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    std::map<std::int64_t, T> entries;
    for (std::int64_t p = 2 * k; p <= 2 * k + degree + 1; ++p)
      entries[p] = oslo_alpha<T>(mesh, degree, p, k);
    cols.push_back(make_mask(entries));
  }
  return cols;
}

// ---- Interpolatory schemes: columns from odd-row stencil weights ----

// weights[i] holds the odd-row stencil: row 2i+1 places weights[i][j] in
// column (i - L + 1 + j), j = 0..2L-1.
template <typename T>
std::vector<Mask> interpolatory_columns(std::int64_t k_lo, std::int64_t k_hi, int L,
                                        const std::map<std::int64_t, std::vector<T>>& weights) {
  std::vector<Mask> cols;
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    std::map<std::int64_t, T> entries;
    entries[2 * k] = T(1);
    for (std::int64_t i = k - L; i <= k + L - 1; ++i) {
      const auto& w = weights.at(i);
      entries[2 * i + 1] = w[static_cast<std::size_t>(k - (i - L + 1))];
    }
    cols.push_back(make_mask(entries));
  }
  return cols;
}

template <typename T>
std::vector<T> lagrange_midpoint_weights(const Mesh& mesh, int L, std::int64_t i) {
  T x = (mesh_point<T>(mesh, i) + mesh_point<T>(mesh, i + 1)) / T(2);
  std::vector<T> w(static_cast<std::size_t>(2 * L), T(0));
  for (int j = 0; j < 2 * L; ++j) {
    std::int64_t node_j = i - L + 1 + j;
    T num(1), den(1);
    for (int n = 0; n < 2 * L; ++n) {
      if (n == j) continue;
      std::int64_t node_n = i - L + 1 + n;
      num *= x - mesh_point<T>(mesh, node_n);
      den *= mesh_point<T>(mesh, node_j) - mesh_point<T>(mesh, node_n);
    }
    w[static_cast<std::size_t>(j)] = num / den;
  }
  return w;
}

template <typename T>
bool near_zero(const T& v, double scale) {
  if constexpr (std::is_same_v<T, Rational>)
    return v.is_zero();
  else
    return std::abs(v) <= 1e-13 * std::max(1.0, scale);
}

// Dense Gaussian elimination with partial pivoting; works for double and
// Rational alike. Throws SingularStencilError via the caller's context.
template <typename T>
std::vector<T> solve_dense(std::vector<std::vector<T>> mat, std::vector<T> rhs) {
  const std::size_t n = rhs.size();
  double scale = 1.0;
  if constexpr (std::is_same_v<T, double>) {
    scale = 0.0;
    for (const auto& row : mat)
      for (double v : row) scale = std::max(scale, std::abs(v));
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    auto mag = [](const T& v) {
      if constexpr (std::is_same_v<T, Rational>)
        return std::abs(v.to_double());
      else
        return std::abs(v);
    };
    for (std::size_t r = c + 1; r < n; ++r)
      if (mag(mat[r][c]) > mag(mat[pivot][c])) pivot = r;
    if (near_zero(mat[pivot][c], scale)) throw SingularStencilError("singular linear system");
    std::swap(mat[c], mat[pivot]);
    std::swap(rhs[c], rhs[pivot]);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (near_zero(mat[r][c], scale)) continue;
      T f = mat[r][c] / mat[c][c];
      for (std::size_t cc = c; cc < n; ++cc) mat[r][cc] -= f * mat[c][cc];
      rhs[r] -= f * rhs[c];
    }
  }
  std::vector<T> x(n, T(0));
  for (std::size_t r = n; r-- > 0;) {
    T acc = rhs[r];
    for (std::size_t cc = r + 1; cc < n; ++cc) acc -= mat[r][cc] * x[cc];
    x[r] = acc / mat[r][r];
  }
  return x;
}

template <typename T>
T kernel_value(const RbfKernel& kernel, const T& x) {
  if constexpr (std::is_same_v<T, Rational>)
    return kernel.exact(x);
  else
    return kernel.eval(std::abs(x));
}

template <typename T>
std::vector<T> rbf_stencil_weights(const Mesh& mesh, const RbfKernel& kernel, int L, int m,
                                   std::int64_t i) {
  const int n = 2 * L;
  const std::size_t dim = static_cast<std::size_t>(n + m);
  T x = (mesh_point<T>(mesh, i) + mesh_point<T>(mesh, i + 1)) / T(2);
  std::vector<T> nodes;
  for (int j = 0; j < n; ++j) nodes.push_back(mesh_point<T>(mesh, i - L + 1 + j));

  std::vector<std::vector<T>> S(dim, std::vector<T>(dim, T(0)));
  std::vector<T> rhs(dim, T(0));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) S[a][b] = kernel_value<T>(kernel, nodes[a] - nodes[b]);
    // polynomial block centered at the midpoint for conditioning; the
    // solution u is unchanged by the change of polynomial basis
    T pw(1);
    for (int j = 0; j < m; ++j) {
      S[a][static_cast<std::size_t>(n + j)] = pw;
      S[static_cast<std::size_t>(n + j)][a] = pw;
      pw *= nodes[a] - x;
    }
    rhs[a] = kernel_value<T>(kernel, x - nodes[a]);
  }
  if (m > 0) rhs[static_cast<std::size_t>(n)] = T(1);  // (x - x)^0

  std::vector<T> sol;
  try {
    sol = solve_dense(S, rhs);
  } catch (const SingularStencilError&) {
    throw SingularStencilError("singular saddle system at stencil " + std::to_string(i) +
                               " (kernel " + kernel.name + ")");
  }
  sol.resize(static_cast<std::size_t>(n));
  return sol;
}

template <typename T>
Scheme build_interpolatory(const Mesh& mesh, int L, SchemeFamily family,
                           const std::function<std::vector<T>(std::int64_t)>& row_weights) {
  std::int64_t C = 2 * L + 6;
  std::map<std::int64_t, std::vector<T>> weights;
  for (std::int64_t i = -C - L; i <= C + L; ++i) weights[i] = row_weights(i);
  auto cols = interpolatory_columns<T>(-C, C, L, weights);
  Scheme s;
  s.mesh = mesh;
  s.Z = SlantedMatrix::from_columns(2, -C, std::move(cols));
  s.interpolatory = true;
  s.family = family;
  s.L = L;
  return s;
}

}  // namespace

Scheme build_bspline(const Mesh& mesh, int degree) {
  if (degree < 1) throw ValidationError("bspline degree must be >= 1");
  std::int64_t C = degree + 7;
  std::vector<Mask> cols;
  if (mesh.exact()) {
    try {
      cols = bspline_columns<Rational>(mesh, degree, -C, C);
    } catch (const RationalOverflow&) {
      cols.clear();
    }
  }
  if (cols.empty()) cols = bspline_columns<double>(mesh, degree, -C, C);
  Scheme s;
  s.mesh = mesh;
  s.Z = SlantedMatrix::from_columns(2, -C, std::move(cols));
  // Columns are anchored to the left knot of the spline's support, so data
  // reproduction runs through Greville abscissae rather than mesh powers.
  s.interpolatory = false;
  s.reproduction_degree = degree;
  s.family = SchemeFamily::bspline;
  s.degree = degree;
  return s;
}

Scheme build_dd(const Mesh& mesh, int L) {
  if (L < 1) throw ValidationError("dd parameter L must be >= 1");
  Scheme s;
  if (mesh.exact()) {
    try {
      s = build_interpolatory<Rational>(mesh, L, SchemeFamily::dd, [&](std::int64_t i) {
        return lagrange_midpoint_weights<Rational>(mesh, L, i);
      });
      s.reproduction_degree = 2 * L - 1;
      return s;
    } catch (const RationalOverflow&) {
    }
  }
  s = build_interpolatory<double>(mesh, L, SchemeFamily::dd, [&](std::int64_t i) {
    return lagrange_midpoint_weights<double>(mesh, L, i);
  });
  s.reproduction_degree = 2 * L - 1;
  return s;
}

Scheme build_rbf(const Mesh& mesh, const RbfKernel& kernel, int L, int m) {
  if (L < 1) throw ValidationError("rbf parameter L must be >= 1");
  if (m < kernel.cpd_order || m > 2 * L)
    throw ValidationError("rbf requires cpd_order <= m <= 2L (kernel " + kernel.name +
                          " has cpd order " + std::to_string(kernel.cpd_order) + ")");
  Scheme s;
  bool built = false;
  if (mesh.exact() && kernel.exact) {
    try {
      s = build_interpolatory<Rational>(mesh, L, SchemeFamily::rbf, [&](std::int64_t i) {
        return rbf_stencil_weights<Rational>(mesh, kernel, L, m, i);
      });
      built = true;
    } catch (const RationalOverflow&) {
    }
  }
  if (!built)
    s = build_interpolatory<double>(mesh, L, SchemeFamily::rbf, [&](std::int64_t i) {
      return rbf_stencil_weights<double>(mesh, kernel, L, m, i);
    });
  s.reproduction_degree = m - 1;
  s.m = m;
  s.kernel = kernel.name;
  return s;
}

bool SchemeDiagnostics::ok(double tol) const {
  double rep = 0.0;
  for (double r : reproduction_residuals) rep = std::max(rep, r);
  return row_sum_residual <= tol && interpolation_residual <= tol && rep <= tol &&
         dominant_is_simple_one;
}

SchemeDiagnostics check_scheme(const Scheme& s) {
  SchemeDiagnostics d;
  const auto& Z = s.Z;
  std::int64_t w = Z.max_support();
  std::int64_t r_lo = 2 * Z.k_left() - 3 * w;
  std::int64_t r_hi = 2 * Z.k_right() + 3 * w;

  for (std::int64_t i = r_lo; i <= r_hi; ++i) {
    auto [c0, c1] = Z.columns_touching_rows(i, i + 1);
    double sum = 0.0;
    for (std::int64_t k = c0; k < c1; ++k) sum += Z.entry(i, k);
    d.row_sum_residual = std::max(d.row_sum_residual, std::abs(sum - 1.0));
    if (s.interpolatory && i % 2 == 0) {
      for (std::int64_t k = c0; k < c1; ++k) {
        double expect = (k == i / 2) ? 1.0 : 0.0;
        d.interpolation_residual =
            std::max(d.interpolation_residual, std::abs(Z.entry(i, k) - expect));
      }
    }
  }

  Mesh fine = s.mesh.refined();
  if (s.family == SchemeFamily::bspline) {
    // Knot insertion maps control points of a polynomial onto control points
    // of the same polynomial; for linear data those are Greville abscissae,
    // not mesh powers. Check Z xi = xi' exactly (Marsden identity).
    auto greville = [&](const Mesh& msh, std::int64_t k) {
      double sum = 0.0;
      for (int j = 1; j <= s.degree; ++j) sum += msh.point(k + j);
      return sum / s.degree;
    };
    double worst0 = 0.0, worst1 = 0.0;
    for (std::int64_t i = r_lo; i <= r_hi; ++i) {
      auto [c0, c1] = Z.columns_touching_rows(i, i + 1);
      double s0 = 0.0, s1 = 0.0;
      for (std::int64_t k = c0; k < c1; ++k) {
        s0 += Z.entry(i, k);
        s1 += Z.entry(i, k) * greville(s.mesh, k);
      }
      worst0 = std::max(worst0, std::abs(s0 - 1.0));
      worst1 = std::max(worst1, std::abs(s1 - greville(fine, i)));
    }
    d.reproduction_residuals = {worst0, worst1};
  } else {
    for (int alpha = 0; alpha <= s.reproduction_degree; ++alpha) {
      double worst = 0.0;
      for (std::int64_t i = r_lo; i <= r_hi; ++i) {
        auto [c0, c1] = Z.columns_touching_rows(i, i + 1);
        double sum = 0.0;
        for (std::int64_t k = c0; k < c1; ++k)
          sum += Z.entry(i, k) * std::pow(s.mesh.point(k), alpha);
        worst = std::max(worst, std::abs(sum - std::pow(fine.point(i), alpha)));
      }
      d.reproduction_residuals.push_back(worst);
    }
  }

  // Finite section of the irregular part: square block around the origin.
  std::int64_t a = Z.k_left() - 2 * w;
  std::int64_t b = Z.k_right() + 2 * w;
  Eigen::MatrixXd block(b - a + 1, b - a + 1);
  for (std::int64_t i = a; i <= b; ++i)
    for (std::int64_t k = a; k <= b; ++k) block(i - a, k - a) = Z.entry(i, k);
  Eigen::EigenSolver<Eigen::MatrixXd> es(block, /*computeEigenvectors=*/false);
  std::vector<double> mods;
  std::vector<std::complex<double>> eigs;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
    mods.push_back(std::abs(es.eigenvalues()(j)));
    eigs.push_back(es.eigenvalues()(j));
  }
  std::sort(mods.begin(), mods.end(), std::greater<>());
  d.dominant_eigenvalue = mods.empty() ? 0.0 : mods[0];
  d.second_eigenvalue_modulus = mods.size() > 1 ? mods[1] : 0.0;
  bool near_one = false;
  for (auto& lambda : eigs)
    if (std::abs(lambda - std::complex<double>(1.0, 0.0)) < 1e-6) near_one = true;
  d.dominant_is_simple_one =
      near_one && d.dominant_eigenvalue < 1.0 + 1e-6 && d.second_eigenvalue_modulus < 1.0 - 1e-6;
  return d;
}

}  // namespace holzyg
