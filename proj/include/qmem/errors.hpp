#pragma once

#include <stdexcept>
#include <string>

namespace qmem {

// Bad inputs: out-of-range parameters, malformed configuration, violated
// preconditions. The CLI maps these to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation that ran but whose result cannot be trusted (ill-conditioned
// kernel, z-step non-convergence, failed fit). The CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qmem
