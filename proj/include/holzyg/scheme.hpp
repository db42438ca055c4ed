// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "holzyg/kernels.hpp"
#include "holzyg/mesh.hpp"
#include "holzyg/slanted_matrix.hpp"

namespace holzyg {

enum class SchemeFamily { bspline, dd, rbf };

std::string family_name(SchemeFamily f);
SchemeFamily family_by_name(const std::string& name);

/// A semi-regular binary subdivision scheme: its mesh, 2-slanted subdivision
/// matrix (columns are the refinement masks of the basic limit functions),
/// and reproduction metadata.
struct Scheme {
  Mesh mesh{1.0, 1.0};
  SlantedMatrix Z;
  bool interpolatory = false;
  int reproduction_degree = 0;
  SchemeFamily family = SchemeFamily::dd;
  // family parameters
  int degree = 0;       // bspline
  int L = 0;            // dd, rbf
  int m = 0;            // rbf
  std::string kernel;   // rbf
};

/// Midpoint knot-insertion subdivision for B-splines of the given degree.
/// Exact rational masks whenever the mesh is rational.
Scheme build_bspline(const Mesh& mesh, int degree);

/// Interpolatory 2L-point scheme: odd rows are Lagrange weights of degree
/// 2L-1 interpolation at the 2L nearest knots, evaluated at the midpoint.
Scheme build_dd(const Mesh& mesh, int L);

/// Interpolatory RBF scheme: odd rows solve the saddle system of kernel
/// interpolation with polynomial reproduction of order m on 2L-point stencils.
Scheme build_rbf(const Mesh& mesh, const RbfKernel& kernel, int L, int m);

/// Diagnostics for the structural scheme properties; never throws.
struct SchemeDiagnostics {
  double row_sum_residual = 0.0;        // max |(Z 1)(i) - 1|
  double interpolation_residual = 0.0;  // max |Z(2i,k) - delta| (interpolatory only)
  // Interpolatory: |Z t^a - (t/2)^a| per a = 0..reproduction_degree.
  // B-spline: constants and the Greville abscissae identity Z xi = xi'.
  std::vector<double> reproduction_residuals;
  double dominant_eigenvalue = 0.0;        // finite section of the irregular part
  double second_eigenvalue_modulus = 0.0;
  bool dominant_is_simple_one = false;
  bool ok(double tol = 1e-10) const;
};

SchemeDiagnostics check_scheme(const Scheme& s);

}  // namespace holzyg
