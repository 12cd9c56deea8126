#include "rtwave/pressure_law.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rtwave {

PressureLaw PressureLaw::polytropic(double K, double alpha) {
  if (!(K > 0.0) || !(alpha > 1.0) || !std::isfinite(K) || !std::isfinite(alpha))
    throw DomainError("polytropic law requires K > 0 and alpha > 1");
  PressureLaw law;
  law.kind_ = Kind::polytropic;
  law.K_ = K;
  law.alpha_ = alpha;
  return law;
}

PressureLaw PressureLaw::tabulated(std::vector<double> density,
                                   std::vector<double> pressure) {
  const std::size_t n = density.size();
  if (n < 3 || pressure.size() != n)
    throw DomainError("tabulated law needs at least 3 matching (density, pressure) pairs");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(density[i] > 0.0) || !(pressure[i] > 0.0))
      throw DomainError("tabulated law must have positive density and pressure");
    if (i > 0 && (!(density[i] > density[i - 1]) || !(pressure[i] > pressure[i - 1])))
      throw DomainError("tabulated law must be strictly increasing");
  }
  PressureLaw law;
  law.kind_ = Kind::tabulated;
  law.z_ = std::move(density);
  law.p_ = std::move(pressure);

  // Fritsch-Carlson slopes.
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = law.z_[i + 1] - law.z_[i];
    d[i] = (law.p_[i + 1] - law.p_[i]) / h[i];
  }
  law.m_.assign(n, 0.0);
  law.m_[0] = d[0];
  law.m_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double w1 = 2.0 * h[i] + h[i - 1];
    const double w2 = h[i] + 2.0 * h[i - 1];
    law.m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
  }
  return law;
}

double PressureLaw::min_density() const {
  return kind_ == Kind::polytropic ? 0.0 : z_.front();
}

double PressureLaw::max_density() const {
  return kind_ == Kind::polytropic ? std::numeric_limits<double>::infinity() : z_.back();
}

double PressureLaw::min_pressure() const {
  return kind_ == Kind::polytropic ? 0.0 : p_.front();
}

double PressureLaw::max_pressure() const {
  return kind_ == Kind::polytropic ? std::numeric_limits<double>::infinity() : p_.back();
}

bool PressureLaw::in_domain(double z) const {
  if (!std::isfinite(z)) return false;
  if (kind_ == Kind::polytropic) return z > 0.0;
  return z >= z_.front() && z <= z_.back();
}

bool PressureLaw::in_range(double p) const {
  if (!std::isfinite(p)) return false;
  if (kind_ == Kind::polytropic) return p > 0.0;
  return p >= p_.front() && p <= p_.back();
}

void PressureLaw::check_domain(double z) const {
  if (!in_domain(z)) {
    std::ostringstream os;
    os << "density " << z << " outside pressure-law domain";
    throw DomainError(os.str());
  }
}

int PressureLaw::segment(double z) const {
  auto it = std::upper_bound(z_.begin(), z_.end(), z);
  int i = static_cast<int>(it - z_.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(z_.size()) - 2);
}

double PressureLaw::pressure(double z) const {
  check_domain(z);
  if (kind_ == Kind::polytropic) return K_ * std::pow(z, alpha_);
  const int i = segment(z);
  const double h = z_[i + 1] - z_[i];
  const double t = (z - z_[i]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * p_[i] + h10 * h * m_[i] + h01 * p_[i + 1] + h11 * h * m_[i + 1];
}

double PressureLaw::dpressure(double z) const {
  check_domain(z);
  if (kind_ == Kind::polytropic) return K_ * alpha_ * std::pow(z, alpha_ - 1.0);
  const int i = segment(z);
  const double h = z_[i + 1] - z_[i];
  const double t = (z - z_[i]) / h;
  const double d00 = 6 * t * t - 6 * t;
  const double d10 = 3 * t * t - 4 * t + 1;
  const double d01 = -6 * t * t + 6 * t;
  const double d11 = 3 * t * t - 2 * t;
  return (d00 * p_[i] + d01 * p_[i + 1]) / h + d10 * m_[i] + d11 * m_[i + 1];
}

double PressureLaw::d2pressure(double z) const {
  check_domain(z);
  if (kind_ == Kind::polytropic)
    return K_ * alpha_ * (alpha_ - 1.0) * std::pow(z, alpha_ - 2.0);
  const int i = segment(z);
  const double h = z_[i + 1] - z_[i];
  const double t = (z - z_[i]) / h;
  const double s00 = 12 * t - 6;
  const double s10 = 6 * t - 4;
  const double s01 = -12 * t + 6;
  const double s11 = 6 * t - 2;
  return (s00 * p_[i] + s01 * p_[i + 1]) / (h * h) + (s10 * m_[i] + s11 * m_[i + 1]) / h;
}

double PressureLaw::inverse(double p) const {
  if (!in_range(p)) {
    std::ostringstream os;
    os << "pressure " << p << " outside pressure-law range";
    throw DomainError(os.str());
  }
  if (kind_ == Kind::polytropic) return std::pow(p / K_, 1.0 / alpha_);
  auto it = std::upper_bound(p_.begin(), p_.end(), p);
  int i = std::clamp(static_cast<int>(it - p_.begin()) - 1, 0, static_cast<int>(p_.size()) - 2);
  double lo = z_[i], hi = z_[i + 1];
  double z = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = pressure(z) - p;
    if (f > 0) hi = z; else lo = z;
    const double fp = dpressure(z);
    double next = fp > 0 ? z - f / fp : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) <= 1e-15 * std::abs(z)) return next;
    z = next;
    if (hi - lo <= 1e-15 * hi) break;
  }
  return z;
}

}  // namespace rtwave
