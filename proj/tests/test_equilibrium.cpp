#include <gtest/gtest.h>

#include <cmath>

#include "rtwave/equilibrium.hpp"

using namespace rtwave;

namespace {

PhysicalParams unit_params() {
  PhysicalParams p;
  p.g = 1.0;
  p.p_atm = 1.0;
  p.ell = 1.0;
  p.b = 1.0;
  p.L1 = 1.0;
  p.L2 = 1.0;
  return p;
}

}  // namespace

TEST(PressureLaw, PolytropicRejectsBadCoefficients) {
  EXPECT_THROW(PressureLaw::polytropic(-1.0, 2.0), DomainError);
  EXPECT_THROW(PressureLaw::polytropic(1.0, 1.0), DomainError);
}

TEST(PressureLaw, TabulatedIsMonotoneAndInterpolates) {
  std::vector<double> z, p;
  for (int i = 0; i <= 20; ++i) {
    z.push_back(1.0 + 0.1 * i);
    p.push_back(z.back() * z.back());
  }
  auto law = PressureLaw::tabulated(z, p);
  EXPECT_NEAR(law.pressure(1.55), 1.55 * 1.55, 1e-3);
  EXPECT_NEAR(law.dpressure(1.55), 3.1, 1e-2);
  EXPECT_NEAR(law.inverse(law.pressure(2.345)), 2.345, 1e-12);
  for (int i = 0; i < 200; ++i) EXPECT_GT(law.dpressure(1.0 + 0.01 * i), 0.0);
  EXPECT_THROW(law.pressure(0.5), DomainError);
  EXPECT_THROW(PressureLaw::tabulated({1, 2, 1.5}, {1, 2, 3}), DomainError);
}

TEST(Enthalpy, HandValues) {
  EXPECT_NEAR(enthalpy(PressureLaw::polytropic(1.0, 2.0), 1.0, 3.0), 4.0, 1e-12);
  EXPECT_EQ(enthalpy(PressureLaw::polytropic(1.0, 2.0), 1.7, 1.7), 0.0);
  EXPECT_NEAR(enthalpy(PressureLaw::polytropic(2.0, 1.5), 1.0, 4.0), 6.0, 1e-12);
  EXPECT_THROW(enthalpy(PressureLaw::polytropic(1.0, 2.0), 1.0, -1.0), DomainError);
}

TEST(Enthalpy, IncreasingAndInvertible) {
  auto law = PressureLaw::polytropic(1.3, 1.4);
  double prev = -1e300;
  for (int i = 1; i < 50; ++i) {
    const double h = enthalpy(law, 1.0, 0.1 * i);
    EXPECT_GT(h, prev);
    prev = h;
    EXPECT_NEAR(enthalpy_inverse(law, 1.0, h), 0.1 * i, 1e-12 * 0.1 * i);
  }
}

TEST(Admissibility, PolytropicAlwaysPasses) {
  for (double a : {1.05, 1.4, 2.0, 3.0}) {
    auto p = unit_params();
    p.ell = 7.0;
    p.b = 11.0;
    auto rep = check_admissibility(PressureLaw::polytropic(2.0, a), PressureLaw::polytropic(0.5, a + 0.3), p);
    EXPECT_TRUE(rep.all_passed()) << a;
    EXPECT_TRUE(rep.conditions[1].bound_infinite);
    EXPECT_TRUE(rep.conditions[3].bound_infinite);
  }
}

TEST(Admissibility, PatmOutsideTableFailsCondition1) {
  auto law = PressureLaw::tabulated({1.0, 2.0, 3.0, 4.0}, {1.0, 2.0, 3.0, 4.0});
  auto p = unit_params();
  p.p_atm = 0.5;
  auto rep = check_admissibility(law, law, p);
  EXPECT_FALSE(rep.conditions[0].passed);
  EXPECT_EQ(rep.first_failure(), 1);
}

TEST(Admissibility, IntegrableEnthalpyFailsCondition2) {
  // P(z) = 1 - 1/z on [1.1, 1000]; p_atm = 0.5 gives rho_1 = 2 and the
  // bound integral of z^-3 over [2, 1000] = 1/8 - 1/(2e6).
  std::vector<double> z, pr;
  for (int i = 0; i <= 4000; ++i) {
    const double r = 1.1 * std::pow(1000.0 / 1.1, i / 4000.0);
    z.push_back(r);
    pr.push_back(1.0 - 1.0 / r);
  }
  auto law = PressureLaw::tabulated(z, pr);
  auto p = unit_params();
  p.p_atm = 0.5;
  p.ell = 0.2;
  auto rep = check_admissibility(law, PressureLaw::polytropic(1.0, 2.0), p);
  EXPECT_TRUE(rep.conditions[0].passed);
  EXPECT_FALSE(rep.conditions[1].passed);
  EXPECT_NEAR(rep.conditions[1].bound, 0.125 - 0.5e-6, 1e-5);
  p.ell = 0.1;
  rep = check_admissibility(law, PressureLaw::polytropic(1.0, 2.0), p);
  EXPECT_TRUE(rep.conditions[1].passed);
}

TEST(Admissibility, CoverageErrorForUncoveredLimit) {
  auto law = PressureLaw::tabulated({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
  EXPECT_THROW(admissibility_bound(law, 0.5, 1.0), DomainCoverageError);
}

TEST(Equilibrium, UpperClosedFormHandExample) {
  auto p = unit_params();
  auto prof = build_equilibrium(PressureLaw::polytropic(1, 2), PressureLaw::polytropic(1, 2), p, 16);
  EXPECT_NEAR(prof.rho1, 1.0, 1e-14);
  EXPECT_NEAR(prof.rho_top_of_interface, 1.5, 1e-14);
  for (double y : {0.0, 0.25, 0.7, 1.0}) EXPECT_NEAR(prof.density(Layer::plus, y), 1.0 + (1.0 - y) / 2.0, 1e-14);
  EXPECT_NEAR(prof.rho_bot_of_interface, 1.5, 1e-14);
  EXPECT_NEAR(prof.jump, 0.0, 1e-14);
}

TEST(Equilibrium, JumpAndCriticalTension) {
  auto p = unit_params();
  auto prof = build_equilibrium(PressureLaw::polytropic(1, 2), PressureLaw::polytropic(9, 2), p, 16);
  EXPECT_NEAR(prof.rho_bot_of_interface, 0.5, 1e-14);
  EXPECT_NEAR(prof.jump, 1.0, 1e-14);
  EXPECT_NEAR(prof.sigma_c, 1.0, 1e-14);
}

TEST(Equilibrium, ClosedFormMatchesGenericInversion) {
  auto p = unit_params();
  p.g = 2.3;
  p.ell = 0.7;
  p.b = 1.3;
  p.p_atm = 0.8;
  auto lp = PressureLaw::polytropic(1.7, 1.4);
  auto lm = PressureLaw::polytropic(0.6, 2.5);
  auto a = build_equilibrium(lp, lm, p, 24, ProfilePath::automatic);
  auto b = build_equilibrium(lp, lm, p, 24, ProfilePath::generic);
  EXPECT_NEAR(a.rho_bot_of_interface, b.rho_bot_of_interface, 1e-10 * a.rho_bot_of_interface);
  for (std::size_t i = 0; i < a.rho_plus.size(); ++i) {
    EXPECT_NEAR(a.rho_plus[i], b.rho_plus[i], 1e-10 * a.rho_plus[i]);
    EXPECT_NEAR(a.rho_minus[i], b.rho_minus[i], 1e-10 * a.rho_minus[i]);
  }
}

TEST(Equilibrium, StrictlyDecreasingAndHydrostatic) {
  auto p = unit_params();
  p.g = 1.7;
  auto lp = PressureLaw::polytropic(1.2, 1.6);
  auto lm = PressureLaw::polytropic(3.0, 1.3);
  auto prof = build_equilibrium(lp, lm, p, 32);
  for (std::size_t i = 1; i < prof.rho_plus.size(); ++i) {
    EXPECT_LT(prof.rho_plus[i], prof.rho_plus[i - 1]);
    EXPECT_LT(prof.rho_minus[i], prof.rho_minus[i - 1]);
  }
  EXPECT_NEAR(lp.pressure(prof.rho_top_of_interface), lm.pressure(prof.rho_bot_of_interface),
              1e-10 * lp.pressure(prof.rho_top_of_interface));
  // d/dx3 P(rho) + g rho = 0 by centered differences of the exact profile
  for (double y : {0.2, 0.5, 0.8}) {
    const double h = 1e-5;
    const double dP = (lp.pressure(prof.density(Layer::plus, y + h)) - lp.pressure(prof.density(Layer::plus, y - h))) / (2 * h);
    EXPECT_NEAR(dP + p.g * prof.density(Layer::plus, y), 0.0, 1e-8);
    const double dPm = (lm.pressure(prof.density(Layer::minus, -y + h)) - lm.pressure(prof.density(Layer::minus, -y - h))) / (2 * h);
    EXPECT_NEAR(dPm + p.g * prof.density(Layer::minus, -y), 0.0, 1e-8);
  }
}

TEST(Equilibrium, CriticalTensionLinearAndSymmetric) {
  EXPECT_DOUBLE_EQ(critical_surface_tension(2.0, 3.0, 1.5, 0.5), 2.0 * 3.0 * 2.25);
  EXPECT_DOUBLE_EQ(critical_surface_tension(2.0, 3.0, 0.5, 1.5), critical_surface_tension(2.0, 3.0, 1.5, 0.5));
  EXPECT_DOUBLE_EQ(critical_surface_tension(4.0, 3.0, 1.5, 0.5), 2.0 * critical_surface_tension(2.0, 3.0, 1.5, 0.5));
  EXPECT_DOUBLE_EQ(critical_surface_tension(2.0, 6.0, 1.5, 0.5), 2.0 * critical_surface_tension(2.0, 3.0, 1.5, 0.5));
}

TEST(Equilibrium, AdmissibilityFailureRaises) {
  auto law = PressureLaw::tabulated({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
  auto p = unit_params();
  p.p_atm = 10.0;
  try {
    build_equilibrium(law, law, p, 16);
    FAIL();
  } catch (const AdmissibilityError& e) {
    EXPECT_EQ(e.condition(), 1);
  }
}

TEST(EquilibriumMasses, FivePiSquared) {
  auto p = unit_params();
  auto prof = build_equilibrium(PressureLaw::polytropic(1, 2), PressureLaw::polytropic(1, 2), p, 64);
  auto m = equilibrium_masses(prof, p);
  EXPECT_NEAR(m.plus_closed, 5 * pi * pi, 1e-12);
  EXPECT_NEAR(m.plus_quadrature, 5 * pi * pi, 1e-8 * 5 * pi * pi);
  EXPECT_NEAR(m.minus_quadrature, m.minus_closed, 1e-8 * m.minus_closed);
  EXPECT_NEAR(prof.M_plus, 5 * pi * pi, 1e-12);
}

TEST(EquilibriumMasses, VanishingLayer) {
  auto p = unit_params();
  p.ell = 1e-8;
  auto prof = build_equilibrium(PressureLaw::polytropic(1, 2), PressureLaw::polytropic(1, 2), p, 16);
  auto m = equilibrium_masses(prof, p);
  EXPECT_NEAR(m.plus_closed, 0.0, 1e-6);
  EXPECT_NEAR(m.plus_quadrature, m.plus_closed, 1e-8 * std::max(1e-300, m.plus_closed));
}

TEST(EquilibriumMasses, QuadratureMatchesClosedFormGeneric) {
  auto p = unit_params();
  p.ell = 0.6;
  p.b = 2.0;
  p.g = 3.0;
  auto lp = PressureLaw::polytropic(1.5, 1.4);
  auto lm = PressureLaw::polytropic(1.0, 1.8);
  auto prof = build_equilibrium(lp, lm, p, 48, ProfilePath::generic);
  auto m = equilibrium_masses(prof, p);
  EXPECT_NEAR(m.plus_quadrature, m.plus_closed, 1e-8 * m.plus_closed);
  EXPECT_NEAR(m.minus_quadrature, m.minus_closed, 1e-8 * m.minus_closed);
}

TEST(EquilibriumMasses, HeightsFromMassesRoundTrip) {
  auto p = unit_params();
  p.ell = 0.8;
  p.b = 1.7;
  auto lp = PressureLaw::polytropic(1.5, 1.4);
  auto lm = PressureLaw::polytropic(2.0, 1.8);
  auto prof = build_equilibrium(lp, lm, p, 32);
  auto [ell, b] = heights_from_masses(lp, lm, p, prof.M_plus, prof.M_minus);
  EXPECT_NEAR(ell, 0.8, 1e-10);
  EXPECT_NEAR(b, 1.7, 1e-10);
  auto tab = PressureLaw::tabulated({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
  EXPECT_THROW(heights_from_masses(tab, tab, p, 1e6, 1.0), AdmissibilityError);
}

TEST(PhysicalParams, ValidationNamesField) {
  auto p = unit_params();
  p.mu_minus = 0.0;
  try {
    p.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("mu_minus"), std::string::npos);
  }
  p = unit_params();
  p.sigma_plus = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
}
