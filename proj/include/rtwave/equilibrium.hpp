#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "rtwave/common.hpp"
#include "rtwave/pressure_law.hpp"

namespace rtwave {

struct PhysicalParams {
  double g = 1.0;
  double p_atm = 1.0;
  double ell = 1.0;
  double b = 1.0;
  double L1 = 1.0;
  double L2 = 1.0;
  double mu_plus = 1.0;
  double mu_minus = 1.0;
  double bulk_plus = 0.0;   // mu'
  double bulk_minus = 0.0;
  double sigma_plus = 0.0;
  double sigma_minus = 0.0;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  double mu(Layer l) const { return l == Layer::plus ? mu_plus : mu_minus; }
  double bulk(Layer l) const { return l == Layer::plus ? bulk_plus : bulk_minus; }
  double sigma(Layer l) const { return l == Layer::plus ? sigma_plus : sigma_minus; }
  double area() const { return 4.0 * pi * pi * L1 * L2; }
  double max_L2() const { return std::max(L1 * L1, L2 * L2); }
};

struct AdmissibilityCondition {
  bool passed = false;
  bool evaluated = false;
  double bound = 0.0;           // conditions 2 and 4 only
  bool bound_infinite = false;
  std::string detail;
};

struct AdmissibilityReport {
  std::array<AdmissibilityCondition, 4> conditions;
  bool all_passed() const;
  /// 1-based index of the first failing condition, 0 if none.
  int first_failure() const;
};

AdmissibilityReport check_admissibility(const PressureLaw& law_plus,
                                        const PressureLaw& law_minus,
                                        const PhysicalParams& params);

/// (1/g) * integral of P'(r)/r over [lower, sup of domain).
AdmissibilityCondition admissibility_bound(const PressureLaw& law, double lower, double g);

/// Integral of P'(r)/r over [ref, z].
double enthalpy(const PressureLaw& law, double ref_density, double z);

/// Solves enthalpy(law, ref, z) = value for z.
double enthalpy_inverse(const PressureLaw& law, double ref_density, double value);

enum class ProfilePath { automatic, generic };

class EquilibriumProfile {
 public:
  std::vector<double> x3_plus, rho_plus;    // ascending CGL nodes on [0, ell]
  std::vector<double> x3_minus, rho_minus;  // ascending CGL nodes on [-b, 0]
  double rho1 = 0.0;
  double rho_top_of_interface = 0.0;  // rho^+
  double rho_bot_of_interface = 0.0;  // rho^-
  double jump = 0.0;
  double sigma_c = 0.0;
  double M_plus = 0.0;
  double M_minus = 0.0;

  double density(Layer l, double x3) const;
  double d1(Layer l, double x3) const;
  double d2(Layer l, double x3) const;

  const PressureLaw& law(Layer l) const { return l == Layer::plus ? law_plus_ : law_minus_; }
  const PhysicalParams& params() const { return params_; }
  ProfilePath path() const { return path_; }

 private:
  friend EquilibriumProfile build_equilibrium(const PressureLaw&, const PressureLaw&,
                                              const PhysicalParams&, int, ProfilePath);
  EquilibriumProfile(PressureLaw lp, PressureLaw lm, PhysicalParams p, ProfilePath path)
      : law_plus_(std::move(lp)), law_minus_(std::move(lm)), params_(p), path_(path) {}
  bool closed_form() const;

  PressureLaw law_plus_, law_minus_;
  PhysicalParams params_;
  ProfilePath path_;
};

/// Throws AdmissibilityError when any admissibility condition fails.
EquilibriumProfile build_equilibrium(const PressureLaw& law_plus, const PressureLaw& law_minus,
                                     const PhysicalParams& params, int n_samples = 64,
                                     ProfilePath path = ProfilePath::automatic);

struct MassPair {
  double plus_quadrature = 0.0;
  double plus_closed = 0.0;
  double minus_quadrature = 0.0;
  double minus_closed = 0.0;
};

MassPair equilibrium_masses(const EquilibriumProfile& profile, const PhysicalParams& params);

/// Layer heights (ell, b) producing the given masses; ell and b in params are ignored.
std::pair<double, double> heights_from_masses(const PressureLaw& law_plus,
                                              const PressureLaw& law_minus,
                                              const PhysicalParams& params, double M_plus,
                                              double M_minus);

double critical_surface_tension(double jump, double g, double L1, double L2);

}  // namespace rtwave
