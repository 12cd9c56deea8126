#include "rtwave/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

namespace rtwave {

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
  if (a == b) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 12, rel_tol);
}

ImproperIntegral integrate_to(const std::function<double(double)>& f, double a,
                              double upper) {
  ImproperIntegral out;
  if (std::isfinite(upper)) {
    out.value = integrate(f, a, upper);
    return out;
  }
  double lo = a;
  double width = std::max(1.0, std::abs(a));
  double sum = 0.0;
  double prev_inc = std::numeric_limits<double>::infinity();
  int shrinking = 0;
  while (true) {
    const double hi = lo + width;
    if (!std::isfinite(hi) || hi > 1e300) {
      out.infinite = true;
      return out;
    }
    const double inc = integrate(f, lo, hi, 1e-12);
    sum += inc;
    if (std::abs(sum) > 1e12) {
      out.infinite = true;
      return out;
    }
    const double ratio = std::abs(inc) / std::abs(prev_inc);
    shrinking = (ratio < 0.75) ? shrinking + 1 : 0;
    if (shrinking >= 3) {
      const double tail = std::abs(inc) * ratio / (1.0 - ratio);
      if (tail <= 1e-13 * std::abs(sum) || tail < 1e-300) {
        out.value = sum + inc * ratio / (1.0 - ratio);
        return out;
      }
    }
    prev_inc = inc;
    lo = hi;
    width *= 2.0;
  }
}

}  // namespace rtwave
