#include "rtwave/equilibrium.hpp"

#include <cmath>
#include <sstream>

#include "rtwave/chebyshev.hpp"
#include "rtwave/quadrature.hpp"

namespace rtwave {

namespace {

void require(bool ok, const char* field, const char* rule) {
  if (!ok) {
    std::ostringstream os;
    os << "params." << field << ": " << rule;
    throw ConfigError(os.str());
  }
}

}  // namespace

void PhysicalParams::validate() const {
  require(g > 0 && std::isfinite(g), "g", "must be > 0");
  require(p_atm > 0 && std::isfinite(p_atm), "p_atm", "must be > 0");
  require(ell > 0 && std::isfinite(ell), "ell", "must be > 0");
  require(b > 0 && std::isfinite(b), "b", "must be > 0");
  require(L1 > 0 && std::isfinite(L1), "L1", "must be > 0");
  require(L2 > 0 && std::isfinite(L2), "L2", "must be > 0");
  require(mu_plus > 0, "mu_plus", "must be > 0");
  require(mu_minus > 0, "mu_minus", "must be > 0");
  require(bulk_plus >= 0, "bulk_plus", "must be >= 0");
  require(bulk_minus >= 0, "bulk_minus", "must be >= 0");
  require(sigma_plus >= 0, "sigma_plus", "must be >= 0");
  require(sigma_minus >= 0, "sigma_minus", "must be >= 0");
  require((sigma_plus == 0) == (sigma_minus == 0), "sigma_plus",
          "surface tensions must be both zero or both positive");
}

bool AdmissibilityReport::all_passed() const { return first_failure() == 0; }

int AdmissibilityReport::first_failure() const {
  for (int i = 0; i < 4; ++i)
    if (!conditions[i].passed) return i + 1;
  return 0;
}

double enthalpy(const PressureLaw& law, double ref_density, double z) {
  if (!law.in_domain(ref_density)) throw DomainError("enthalpy reference density outside law domain");
  if (!law.in_domain(z)) throw DomainError("enthalpy argument outside law domain");
  return integrate([&](double r) { return law.dpressure(r) / r; }, ref_density, z);
}

double enthalpy_inverse(const PressureLaw& law, double ref, double value) {
  if (value == 0.0) return ref;
  double lo, hi;
  if (value > 0) {
    lo = ref;
    if (law.kind() == PressureLaw::Kind::tabulated) {
      hi = law.max_density();
      if (enthalpy(law, ref, hi) < value) throw DomainError("enthalpy value beyond tabulated domain");
    } else {
      hi = 2.0 * ref;
      int guard = 0;
      while (enthalpy(law, ref, hi) < value) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 2000) throw DomainError("enthalpy inverse bracket failed");
      }
    }
  } else {
    hi = ref;
    if (law.kind() == PressureLaw::Kind::tabulated) {
      lo = law.min_density();
      if (enthalpy(law, ref, lo) > value) throw DomainError("enthalpy value below tabulated domain");
    } else {
      lo = 0.5 * ref;
      int guard = 0;
      while (enthalpy(law, ref, lo) > value) {
        hi = lo;
        lo *= 0.5;
        if (++guard > 1000 || lo < 1e-300) throw DomainError("enthalpy value below law domain");
      }
    }
  }
  // Safeguarded Newton: h' = P'(z)/z > 0.
  double z = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = enthalpy(law, ref, z) - value;
    if (f == 0.0) return z;
    if (f < 0) lo = z; else hi = z;
    const double fp = law.dpressure(z) / z;
    double next = z - f / fp;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) <= 1e-15 * std::abs(z) || hi - lo <= 1e-15 * hi) return next;
    z = next;
  }
  return z;
}

AdmissibilityCondition admissibility_bound(const PressureLaw& law, double lower, double g) {
  if (!law.in_domain(lower))
    throw DomainCoverageError("law domain does not cover the lower limit of the admissibility integral");
  AdmissibilityCondition c;
  c.evaluated = true;
  auto res = integrate_to([&](double r) { return law.dpressure(r) / r; }, lower, law.max_density());
  c.bound_infinite = res.infinite;
  c.bound = res.infinite ? std::numeric_limits<double>::infinity() : res.value / g;
  return c;
}

AdmissibilityReport check_admissibility(const PressureLaw& lp, const PressureLaw& lm,
                                        const PhysicalParams& p) {
  AdmissibilityReport rep;
  auto& c1 = rep.conditions[0];
  auto& c2 = rep.conditions[1];
  auto& c3 = rep.conditions[2];
  auto& c4 = rep.conditions[3];
  c1.evaluated = true;
  c1.passed = lp.in_range(p.p_atm);
  if (!c1.passed) {
    c1.detail = "p_atm outside the range of P_plus";
    c2.detail = c3.detail = c4.detail = "not evaluated: depends on condition 1";
    return rep;
  }
  const double rho1 = lp.inverse(p.p_atm);
  c2 = admissibility_bound(lp, rho1, p.g);
  c2.passed = p.ell < c2.bound;
  if (!c2.passed) {
    std::ostringstream os;
    os << "ell = " << p.ell << " is not below the bound " << c2.bound;
    c2.detail = os.str();
    c3.detail = c4.detail = "not evaluated: depends on condition 2";
    return rep;
  }
  const double rho_top = enthalpy_inverse(lp, rho1, p.g * p.ell);
  const double p_int = lp.pressure(rho_top);
  c3.evaluated = true;
  c3.passed = lm.in_range(p_int);
  if (!c3.passed) {
    c3.detail = "interface pressure outside the range of P_minus";
    c4.detail = "not evaluated: depends on condition 3";
    return rep;
  }
  const double rho_bot = lm.inverse(p_int);
  c4 = admissibility_bound(lm, rho_bot, p.g);
  c4.passed = p.b < c4.bound;
  if (!c4.passed) {
    std::ostringstream os;
    os << "b = " << p.b << " is not below the bound " << c4.bound;
    c4.detail = os.str();
  }
  return rep;
}

double critical_surface_tension(double jump, double g, double L1, double L2) {
  return jump * g * std::max(L1 * L1, L2 * L2);
}

bool EquilibriumProfile::closed_form() const {
  return path_ == ProfilePath::automatic && law_plus_.kind() == PressureLaw::Kind::polytropic &&
         law_minus_.kind() == PressureLaw::Kind::polytropic;
}

double EquilibriumProfile::density(Layer l, double x3) const {
  const double g = params_.g;
  if (l == Layer::plus) {
    if (closed_form()) {
      const double K = law_plus_.K(), a = law_plus_.alpha();
      return std::pow(std::pow(rho1, a - 1.0) + g * (a - 1.0) / (K * a) * (params_.ell - x3),
                      1.0 / (a - 1.0));
    }
    return enthalpy_inverse(law_plus_, rho1, g * (params_.ell - x3));
  }
  if (closed_form()) {
    const double K = law_minus_.K(), a = law_minus_.alpha();
    return std::pow(std::pow(rho_bot_of_interface, a - 1.0) + g * (a - 1.0) / (K * a) * (-x3),
                    1.0 / (a - 1.0));
  }
  return enthalpy_inverse(law_minus_, rho_bot_of_interface, -g * x3);
}

double EquilibriumProfile::d1(Layer l, double x3) const {
  const double r = density(l, x3);
  return -params_.g * r / law(l).dpressure(r);
}

double EquilibriumProfile::d2(Layer l, double x3) const {
  const double r = density(l, x3);
  const auto& P = law(l);
  const double pp = P.dpressure(r);
  const double r1 = -params_.g * r / pp;
  return r1 * (-params_.g / pp + params_.g * r * P.d2pressure(r) / (pp * pp));
}

EquilibriumProfile build_equilibrium(const PressureLaw& lp, const PressureLaw& lm,
                                     const PhysicalParams& params, int n_samples,
                                     ProfilePath path) {
  params.validate();
  if (n_samples < 2) throw ConfigError("n_samples must be >= 2");
  const auto rep = check_admissibility(lp, lm, params);
  if (const int f = rep.first_failure(); f != 0) {
    std::ostringstream os;
    os << "admissibility condition " << f << " failed: " << rep.conditions[f - 1].detail;
    throw AdmissibilityError(f, os.str());
  }
  EquilibriumProfile prof(lp, lm, params, path);
  prof.rho1 = lp.inverse(params.p_atm);
  if (prof.closed_form()) {
    prof.rho_top_of_interface = prof.density(Layer::plus, 0.0);
  } else {
    prof.rho_top_of_interface = enthalpy_inverse(lp, prof.rho1, params.g * params.ell);
  }
  prof.rho_bot_of_interface = lm.inverse(lp.pressure(prof.rho_top_of_interface));
  prof.jump = prof.rho_top_of_interface - prof.rho_bot_of_interface;
  prof.sigma_c = critical_surface_tension(prof.jump, params.g, params.L1, params.L2);

  prof.x3_plus = cgl_nodes(n_samples, 0.0, params.ell);
  prof.x3_minus = cgl_nodes(n_samples, -params.b, 0.0);
  prof.rho_plus.resize(n_samples);
  prof.rho_minus.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    prof.rho_plus[i] = prof.density(Layer::plus, prof.x3_plus[i]);
    prof.rho_minus[i] = prof.density(Layer::minus, prof.x3_minus[i]);
  }
  prof.rho_plus.back() = prof.rho1;
  prof.rho_plus.front() = prof.rho_top_of_interface;
  prof.rho_minus.back() = prof.rho_bot_of_interface;
  const auto m = equilibrium_masses(prof, params);
  prof.M_plus = m.plus_closed;
  prof.M_minus = m.minus_closed;
  return prof;
}

MassPair equilibrium_masses(const EquilibriumProfile& prof, const PhysicalParams& params) {
  MassPair m;
  const double area = params.area();
  const auto wp = clenshaw_curtis_weights(static_cast<int>(prof.x3_plus.size()), 0.0, params.ell);
  const auto wm = clenshaw_curtis_weights(static_cast<int>(prof.x3_minus.size()), -params.b, 0.0);
  for (std::size_t i = 0; i < wp.size(); ++i) m.plus_quadrature += wp[i] * prof.rho_plus[i];
  for (std::size_t i = 0; i < wm.size(); ++i) m.minus_quadrature += wm[i] * prof.rho_minus[i];
  m.plus_quadrature *= area;
  m.minus_quadrature *= area;
  const auto& lp = prof.law(Layer::plus);
  const auto& lm = prof.law(Layer::minus);
  const double p_int = lp.pressure(prof.rho_top_of_interface);
  m.plus_closed = area / params.g * (p_int - params.p_atm);
  m.minus_closed = area / params.g * (lm.pressure(prof.rho_minus.front()) - p_int);
  return m;
}

std::pair<double, double> heights_from_masses(const PressureLaw& lp, const PressureLaw& lm,
                                              const PhysicalParams& params, double M_plus,
                                              double M_minus) {
  if (!(M_plus > 0) || !(M_minus > 0)) throw ConfigError("masses must be positive");
  const double area = params.area();
  auto fail = [](int c, const char* what) { throw AdmissibilityError(c, what); };
  if (!lp.in_range(params.p_atm)) fail(1, "p_atm outside the range of P_plus");
  const double rho1 = lp.inverse(params.p_atm);
  const double p_int = params.p_atm + params.g * M_plus / area;
  if (!lp.in_range(p_int)) fail(2, "upper mass requires a pressure beyond the range of P_plus");
  const double rho_top = lp.inverse(p_int);
  const double ell = enthalpy(lp, rho1, rho_top) / params.g;
  if (!lm.in_range(p_int)) fail(3, "interface pressure outside the range of P_minus");
  const double rho_bot = lm.inverse(p_int);
  const double p_bottom = p_int + params.g * M_minus / area;
  if (!lm.in_range(p_bottom)) fail(4, "lower mass requires a pressure beyond the range of P_minus");
  const double b = enthalpy(lm, rho_bot, lm.inverse(p_bottom)) / params.g;
  return {ell, b};
}

}  // namespace rtwave

#include "rtwave/background.hpp"

namespace rtwave {

Background sample_background(const EquilibriumProfile& prof, const Grid& grid) {
  if (std::abs(grid.ell() - prof.params().ell) > 1e-12 * prof.params().ell ||
      std::abs(grid.b() - prof.params().b) > 1e-12 * prof.params().b)
    throw ConfigError("grid layer heights differ from the equilibrium parameters");
  Background bg;
  for (Layer l : {Layer::plus, Layer::minus}) {
    const int li = layer_index(l);
    const auto& z = grid.nodes(l);
    const auto& law = prof.law(l);
    const int n = grid.nv(l);
    for (auto* v : {&bg.rho, &bg.drho, &bg.d2rho, &bg.dp, &bg.d2p, &bg.hprime}) (*v)[li].resize(n);
    for (int i = 0; i < n; ++i) {
      double r;
      if (l == Layer::plus && i == n - 1) r = prof.rho1;
      else if (l == Layer::plus && i == 0) r = prof.rho_top_of_interface;
      else if (l == Layer::minus && i == n - 1) r = prof.rho_bot_of_interface;
      else r = prof.density(l, z[i]);
      const double g = prof.params().g;
      const double p1 = law.dpressure(r);
      const double p2 = law.d2pressure(r);
      const double r1 = -g * r / p1;
      bg.rho[li][i] = r;
      bg.dp[li][i] = p1;
      bg.d2p[li][i] = p2;
      bg.drho[li][i] = r1;
      bg.d2rho[li][i] = r1 * (-g / p1 + g * r * p2 / (p1 * p1));
      bg.hprime[li][i] = p1 / r;
    }
  }
  return bg;
}

}  // namespace rtwave
