// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace holzyg {

/// Bad inputs: malformed files, invalid flag combinations, out-of-range
/// parameters. Mapped to exit code 2 by the CLI.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A computation that cannot proceed: divergent scheme, non-PSD completion,
/// failed tight-frame identity, singular stencil. Mapped to exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RationalOverflow : std::overflow_error {
  RationalOverflow() : std::overflow_error("rational arithmetic overflow") {}
};

struct DivergentSchemeError : NumericalError {
  explicit DivergentSchemeError(const std::string& msg) : NumericalError(msg) {}
};

struct SingularStencilError : NumericalError {
  explicit SingularStencilError(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace holzyg
