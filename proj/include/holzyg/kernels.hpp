// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>

#include "holzyg/rational.hpp"

namespace holzyg {

/// Radial basis function g(x) = g(|x|), conditionally positive definite of
/// order cpd_order. `exact` is set for kernels whose values are rational at
/// rational arguments (polyharmonic odd powers), enabling exact stencils.
struct RbfKernel {
  std::string name;
  int cpd_order = 0;
  bool homogeneous = false;
  std::function<double(double)> eval;
  std::function<Rational(const Rational&)> exact;  // may be empty
};

double kernel_eval(const RbfKernel& kernel, double x);

/// Compactly supported C^2 kernel 12x^4 log|x| - 21x^4 + 32|x|^3 - 12x^2 + 1
/// on |x| < 1 (natural logarithm; value 1 at x = 0, zero outside).
RbfKernel kernel_buhmann();
/// |x|^(2p+1), homogeneous, cpd order p+1.
RbfKernel kernel_polyharmonic(int p);
RbfKernel kernel_gaussian();
RbfKernel kernel_multiquadric();
RbfKernel kernel_inverse_multiquadric();

/// Lookup by CLI name: buhmann, polyharmonic[P], gaussian, multiquadric,
/// inverse_multiquadric. Throws ValidationError for unknown names.
RbfKernel kernel_by_name(const std::string& name);

}  // namespace holzyg
