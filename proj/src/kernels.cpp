// SPDX-License-Identifier: Apache-2.0
#include "holzyg/kernels.hpp"

#include <cmath>

#include "holzyg/errors.hpp"

namespace holzyg {

double kernel_eval(const RbfKernel& kernel, double x) { return kernel.eval(std::abs(x)); }

RbfKernel kernel_buhmann() {
  RbfKernel k;
  k.name = "buhmann";
  k.cpd_order = 0;
  k.homogeneous = false;
  k.eval = [](double x) {
    x = std::abs(x);
    if (x >= 1.0) return 0.0;
    if (x == 0.0) return 1.0;  // x^4 log x -> 0
    double x2 = x * x;
    double x3 = x2 * x;
    double x4 = x2 * x2;
    return 12.0 * x4 * std::log(x) - 21.0 * x4 + 32.0 * x3 - 12.0 * x2 + 1.0;
  };
  return k;
}

RbfKernel kernel_polyharmonic(int p) {
  if (p < 0) throw ValidationError("polyharmonic order must be >= 0");
  RbfKernel k;
  k.name = p == 0 ? "polyharmonic" : "polyharmonic" + std::to_string(p);
  k.cpd_order = p + 1;
  k.homogeneous = true;
  int e = 2 * p + 1;
  k.eval = [e](double x) { return std::pow(std::abs(x), e); };
  k.exact = [e](const Rational& x) {
    Rational v(1);
    Rational ax = x.abs();
    for (int i = 0; i < e; ++i) v *= ax;
    return v;
  };
  return k;
}

RbfKernel kernel_gaussian() {
  RbfKernel k;
  k.name = "gaussian";
  k.cpd_order = 0;
  k.homogeneous = false;
  k.eval = [](double x) { return std::exp(-x * x); };
  return k;
}

RbfKernel kernel_multiquadric() {
  RbfKernel k;
  k.name = "multiquadric";
  k.cpd_order = 1;
  k.homogeneous = false;
  k.eval = [](double x) { return std::sqrt(1.0 + x * x); };
  return k;
}

RbfKernel kernel_inverse_multiquadric() {
  RbfKernel k;
  k.name = "inverse_multiquadric";
  k.cpd_order = 0;
  k.homogeneous = false;
  k.eval = [](double x) { return 1.0 / std::sqrt(1.0 + x * x); };
  return k;
}

RbfKernel kernel_by_name(const std::string& name) {
  if (name == "buhmann") return kernel_buhmann();
  if (name == "gaussian") return kernel_gaussian();
  if (name == "multiquadric") return kernel_multiquadric();
  if (name == "inverse_multiquadric") return kernel_inverse_multiquadric();
  if (name.rfind("polyharmonic", 0) == 0) {
    std::string suffix = name.substr(12);
    int p = suffix.empty() ? 0 : std::stoi(suffix);
    return kernel_polyharmonic(p);
  }
  throw ValidationError("unknown kernel: " + name);
}

}  // namespace holzyg
