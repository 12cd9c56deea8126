#pragma once

#include <functional>

namespace rtwave {

/// Adaptive Gauss-Kronrod integral of f over [a, b] (a > b allowed).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12);

struct ImproperIntegral {
  double value = 0.0;
  bool infinite = false;
};

/// Integral of f over [a, upper). For an infinite upper limit the range is
/// swept in doubling panels; partial sums above 1e12 or panels running past
/// 1e300 declare divergence.
ImproperIntegral integrate_to(const std::function<double(double)>& f, double a,
                              double upper);

}  // namespace rtwave
