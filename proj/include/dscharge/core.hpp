#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace dsc {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

// A chart/domain predicate failed; the message names the violated predicate.
struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Degenerate metric, coordinate horizon, or other singular configuration.
struct singular_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative solver (Newton inversion, bisection, quadrature) did not reach
// its tolerance.
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameter (Lambda <= 0, malformed config field, ...).
struct parameter_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dsc
