#pragma once

#include <stdexcept>
#include <string>

namespace qntk {

/// User-facing precondition violation (bad epsilon/delta, violated sample
/// size bound, missing inputs). The CLI maps these to exit code 3.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Estimated training Gram is singular or indefinite; kernel regression
/// needs an invertible training kernel. CLI exit code 4.
struct SingularGramError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file (JSON/CSV). CLI exit code 2.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qntk
