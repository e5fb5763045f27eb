#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kinetic {

// Caller broke a documented precondition (bad axis, wrong dimension, ...).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Bad run parameters (R >= a/2, missing factor terms, malformed config, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// State space or input too large / too small for the requested operation.
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative solver failed to reach its target residual.
struct NumericalError : std::runtime_error {
  double residual = 0.0;
  NumericalError(const std::string& what, double res)
      : std::runtime_error(what), residual(res) {}
};

// A thinning majorant was caught below the exact rate/probability.
struct BoundViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation at a singular configuration (coincident particles).
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A nested bound chain was caught non-monotone.
struct DominanceViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Jump segment produced an absurd number of events (bad bound or energy blowup).
struct RunawayError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Escape experiment hit the step cap; carries the partial count.
struct EscapeTimeout : std::runtime_error {
  std::uint64_t steps = 0;
  EscapeTimeout(const std::string& what, std::uint64_t n)
      : std::runtime_error(what), steps(n) {}
};

}  // namespace kinetic
