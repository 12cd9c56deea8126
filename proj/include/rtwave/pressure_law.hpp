#pragma once

#include <limits>
#include <vector>

#include "rtwave/common.hpp"

namespace rtwave {

/// Barotropic pressure-density relation P(z).
///
/// Tabulated laws are interpolated by a monotone piecewise cubic
/// (Fritsch-Carlson slopes), so P is C^1 and P'' is piecewise linear.
class PressureLaw {
 public:
  enum class Kind { polytropic, tabulated };

  /// P(z) = K z^alpha with K > 0, alpha > 1.
  static PressureLaw polytropic(double K, double alpha);

  /// Strictly increasing (density, pressure) pairs, at least 3 of them.
  static PressureLaw tabulated(std::vector<double> density,
                               std::vector<double> pressure);

  Kind kind() const { return kind_; }
  double K() const { return K_; }
  double alpha() const { return alpha_; }

  double pressure(double z) const;
  double dpressure(double z) const;
  double d2pressure(double z) const;

  /// P^{-1}(p); throws DomainError outside the range.
  double inverse(double p) const;

  /// Open/closed density domain: (0, inf) for polytropic, [z0, zN] for tables.
  double min_density() const;
  double max_density() const;
  double min_pressure() const;
  double max_pressure() const;
  bool in_domain(double z) const;
  bool in_range(double p) const;

  const std::vector<double>& table_density() const { return z_; }
  const std::vector<double>& table_pressure() const { return p_; }

 private:
  PressureLaw() = default;
  void check_domain(double z) const;
  int segment(double z) const;

  Kind kind_ = Kind::polytropic;
  double K_ = 1.0;
  double alpha_ = 2.0;
  std::vector<double> z_, p_, m_;
};

}  // namespace rtwave
