#pragma once

#include <cmath>

#include "dscharge/core.hpp"

namespace dsc {

enum class DerivMode {
  Auto,              // analytic callbacks when registered, else central FD
  Analytic,          // require analytic callbacks
  FiniteDifference,  // force central FD even when callbacks exist
};

// Central finite differences with the step rule h = max(|x|,1) * noise^(1/3)
// for first derivatives and noise^(1/4) for second derivatives. `noise` is
// the relative evaluation accuracy of the field (machine epsilon for closed
// forms; larger for composed numeric fields), which keeps the rule optimal
// when the integrand itself is only approximately evaluated.
struct DerivativeConfig {
  DerivMode mode = DerivMode::Auto;
  bool richardson = false;

  double step1(double x, double noise) const {
    return std::max(std::abs(x), 1.0) * std::cbrt(noise);
  }
  double step2(double x, double noise) const {
    return std::max(std::abs(x), 1.0) * std::pow(noise, 0.25);
  }
};

// d/dx of a scalar callable, central differences (optionally Richardson).
template <class F>
double fd_derivative(F&& f, double x, double h, bool richardson = false) {
  auto central = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
  if (!richardson) return central(h);
  const double d1 = central(h);
  const double d2 = central(0.5 * h);
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace dsc
