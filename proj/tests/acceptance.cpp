// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "rtwave/fitting.hpp"
#include "rtwave/functional_checks.hpp"
#include "rtwave/scenarios.hpp"

using namespace rtwave;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

PhysicalParams base_params() { return PhysicalParams{}; }

// rho1 = 1, rho+ = 1.5, rho- = 0.5: jump 1, sigma_c 1.
EquilibriumProfile rt_profile(const PhysicalParams& p) {
  return build_equilibrium(PressureLaw::polytropic(1, 2), PressureLaw::polytropic(9, 2), p, 32);
}

// rho- = 2.5: jump -1.
EquilibriumProfile stable_profile(const PhysicalParams& p) {
  return build_equilibrium(PressureLaw::polytropic(1, 2), PressureLaw::polytropic(0.36, 2), p, 32);
}

GridPtr grid(int nv, int nh = 8, double L1 = 1.0, double L2 = 1.0) {
  GridSpec s;
  s.L1 = L1;
  s.L2 = L2;
  s.n_h = nh;
  s.n_v_plus = nv;
  s.n_v_minus = nv;
  return Grid::make(s);
}

FlattenedState seeded(const GridPtr& g, const EquilibriumProfile& prof, double amp) {
  FlattenedState s = FlattenedState::zero(g);
  s.eta_plus = SurfaceField::from_function(g, Surface::plus, [&](double x, double) { return amp * std::cos(x); });
  s.eta_minus = SurfaceField::from_function(g, Surface::minus, [&](double, double y) { return amp * std::cos(y); });
  s.u[0] = VolumeField::from_function(g, [&](Layer, double, double y, double) { return amp * std::sin(y); });
  return project_initial(s, prof);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome sigma_c_reproduction() {
  const PhysicalParams p = base_params();
  const EquilibriumProfile prof = rt_profile(p);
  const GridPtr g = grid(64);
  std::ostringstream os;
  bool ok = true;
  const std::array<std::array<double, 2>, 4> modes{{{1, 0}, {1, 1}, {2, 0}, {2, 1}}};
  double worst_minutes = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& xi = modes[i];
    const double k2 = xi[0] * xi[0] + xi[1] * xi[1];
    const auto t0 = std::chrono::steady_clock::now();
    const NeutralSigmaResult r = find_neutral_sigma(prof, p, *g, xi, {0.0, 2.0 * prof.jump * p.g / k2});
    worst_minutes = std::max(
        worst_minutes, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0);
    const double balance = r.sigma_star * k2 / (prof.jump * p.g);
    ok = ok && std::abs(balance - 1.0) <= 0.02;
    if (i == 0) {
      const double rel = std::abs(r.sigma_star / prof.sigma_c - 1.0);
      ok = ok && rel <= 0.02;
      os << "sigma*/sigma_c - 1 = " << fmt("%.2e", r.sigma_star / prof.sigma_c - 1.0) << " at n_v 64;";
    }
    os << " mode (" << xi[0] << "," << xi[1] << ") balance " << fmt("%.5f", balance) << ";";
  }
  ok = ok && worst_minutes <= 2.0;
  os << " slowest mode " << fmt("%.2f", worst_minutes) << " min";
  return {ok, os.str()};
}

Outcome sharp_poincare() {
  std::ostringstream os;
  bool ok = true;
  for (const auto& L : std::array<std::array<double, 2>, 3>{{{1.0, 1.0}, {1.5, 1.0}, {0.75, 2.0}}}) {
    const double c = sharp_poincare_constant(*grid(8, 16, L[0], L[1]));
    const double exact = 1.0 / std::max(L[0] * L[0], L[1] * L[1]);
    ok = ok && std::abs(c - exact) <= 1e-12;
    os << " (" << L[0] << "," << L[1] << ") |err| " << fmt("%.1e", std::abs(c - exact)) << ";";
  }
  return {ok, os.str()};
}

Outcome stability_table() {
  struct Cell {
    bool heavy_top;
    double sp, sm;
    bool expect_stable;
  };
  const Cell cells[] = {{false, 0, 0, true},     {false, 0.5, 0.5, true}, {false, 2, 2, true},
                        {true, 0.5, 1.5, true},  {true, 2, 2, true},      {true, 0.1, 3, true},
                        {true, 0, 0, false},     {true, 0.5, 0.5, false}, {true, 2, 0.5, false}};
  const double margin = 1e-6;
  const GridPtr g = grid(16);
  const auto t0 = std::chrono::steady_clock::now();
  int agree = 0;
  std::ostringstream os;
  for (const Cell& c : cells) {
    PhysicalParams p = base_params();
    p.sigma_plus = c.sp;
    p.sigma_minus = c.sm;
    const EquilibriumProfile prof = c.heavy_top ? rt_profile(p) : stable_profile(p);
    const Background bg = sample_background(prof, *g);
    double worst = -1e300;
    for (int n1 = 0; n1 <= 2; ++n1)
      for (int n2 = -2; n2 <= 2; ++n2) {
        if (n1 == 0 && n2 <= 0) continue;
        const auto op = assemble_mode_operator({double(n1), double(n2)}, bg, prof, p, *g);
        worst = std::max(worst, growth_rate(op).lambda_max.real());
      }
    const bool decided = std::abs(worst) > margin;
    const bool match = decided && (worst < 0) == c.expect_stable;
    agree += match;
    os << " " << (c.heavy_top ? "+" : "-") << "(" << c.sp << "," << c.sm << ") " << fmt("%.2e", worst)
       << (match ? "" : " MISMATCH") << ";";
  }
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
  return {agree == 9 && minutes <= 10.0,
          std::to_string(agree) + "/9 cells agree in " + fmt("%.2f", minutes) + " min:" + os.str()};
}

Outcome mass_conservation() {
  PhysicalParams p = base_params();
  p.sigma_plus = p.sigma_minus = 0.5;
  const EquilibriumProfile prof = stable_profile(p);
  const GridPtr g = grid(16);
  const FlattenedState s0 = seeded(g, prof, 1e-3);
  std::ostringstream os;
  bool ok = true;
  for (Scheme sc : {Scheme::imex1, Scheme::imex2}) {
    SimulationOptions o;
    o.stepper.scheme = sc;
    o.steps = 1000;
    const SimulationResult r = run_simulation(prof, p, g, s0, o);
    double drift = 0.0;
    for (const auto& rep : r.reports) {
      drift = std::max(drift, std::abs(rep.mass_plus / r.reports.front().mass_plus - 1.0));
      drift = std::max(drift, std::abs(rep.mass_minus / r.reports.front().mass_minus - 1.0));
    }
    ok = ok && drift < 1e-8;
    os << " " << scheme_name(sc) << " drift " << fmt("%.2e", drift) << " over 1000 steps of dt 0.01;";
  }
  return {ok, os.str()};
}

double residual_rms(const EquilibriumProfile& prof, const PhysicalParams& p, const GridPtr& g,
                    const FlattenedState& s0, Scheme sc, double dt, double T) {
  StepperOptions o;
  o.scheme = sc;
  o.dt = dt;
  const Stepper st(prof, p, g, o);
  EnergyMonitor mon(prof, p, g, 0, dt);
  mon.push(s0);
  double ss = 0.0;
  int n = 0;
  advance(st, s0, static_cast<int>(std::lround(T / dt)), [&](const FlattenedState& s, int) {
    const EnergyReport r = mon.push(s);
    if (s.time > 0.2 * T - 1e-12) {
      ss += r.energy_law_residual * r.energy_law_residual;
      ++n;
    }
  });
  return std::sqrt(ss / n);
}

Outcome energy_law_order() {
  const PhysicalParams p = base_params();
  const EquilibriumProfile prof = stable_profile(p);
  const GridPtr g = grid(12);
  const FlattenedState s0 = seeded(g, prof, 1e-3);
  std::ostringstream os;
  bool ok = true;
  for (Scheme sc : {Scheme::imex1, Scheme::imex2}) {
    const double target = sc == Scheme::imex1 ? 2.0 : 4.0, tol = sc == Scheme::imex1 ? 0.3 : 0.6;
    double prev = residual_rms(prof, p, g, s0, sc, 0.02, 1.0);
    os << " " << scheme_name(sc) << " ratios";
    for (double dt : {0.01, 0.005, 0.0025}) {
      const double cur = residual_rms(prof, p, g, s0, sc, dt, 1.0);
      ok = ok && std::abs(prev / cur - target) <= tol;
      os << " " << fmt("%.3f", prev / cur);
      prev = cur;
    }
    os << ";";
  }
  return {ok, os.str()};
}

std::pair<std::vector<double>, std::vector<double>> energy_series(const EquilibriumProfile& prof,
                                                                  const PhysicalParams& p, double T) {
  const GridPtr g = grid(12);
  SimulationOptions o;
  o.steps = static_cast<int>(std::lround(T / o.stepper.dt));
  o.sample_every = 10;
  const SimulationResult r = run_simulation(prof, p, g, seeded(g, prof, 1e-3), o);
  std::vector<double> t, e;
  for (const auto& rep : r.reports) {
    t.push_back(rep.time);
    e.push_back(rep.E_n_sigma);
  }
  return {t, e};
}

Outcome decay_character() {
  PhysicalParams p = base_params();
  p.sigma_plus = p.sigma_minus = 2.0;
  const EquilibriumProfile rt = rt_profile(p);
  const auto [t1, e1] = energy_series(rt, p, 10.0);
  const DecayFit fe = fit_decay(t1, e1, DecayModel::exponential);
  PhysicalParams q = base_params();
  const EquilibriumProfile st = stable_profile(q);
  const auto [t2, e2] = energy_series(st, q, 10.0);
  const DecayFit fa = fit_decay(t2, e2, DecayModel::algebraic);
  const bool mono = nonincreasing_after(e2);
  std::ostringstream os;
  os << "sigma 2 > sigma_c 1: exponential rate " << fmt("%.4f", fe.rate) << " R^2 " << fmt("%.4f", fe.r_squared)
     << "; sigma 0, jump -1: nonincreasing " << (mono ? "yes" : "no") << ", algebraic exponent "
     << fmt("%.3f", fa.rate);
  return {fe.r_squared > 0.98 && fe.rate > 0 && mono && fa.rate > 0, os.str()};
}

Outcome vanishing_sigma() {
  const Config cfg = Config::parse(
      "[laws.plus]\nkind = polytropic\nK = 1\nalpha = 2\n"
      "[laws.minus]\nkind = polytropic\nK = 0.36\nalpha = 2\n"
      "[grid]\nn_h = 8\nn_v = 12\n");
  const ProblemSetup setup = read_problem(cfg);
  const GridPtr g = setup.make_grid();
  const FlattenedState s0 = seeded(g, setup.profile(), 1e-3);
  SimulationOptions o;
  o.steps = 100;
  const SigmaLimitReport r = sigma_limit_experiment(setup, s0, o, {0.1, 0.05, 0.025});
  std::ostringstream os;
  os << "T 1 distances";
  for (double d : r.distances) os << " " << fmt("%.4e", d);
  os << "; order p " << fmt("%.3f", r.order) << (r.incomplete ? "; incomplete: " + r.failure : "");
  return {!r.incomplete && r.monotone && r.order > 0, os.str()};
}

Outcome modal_rates() {
  std::ostringstream os;
  bool ok = true;
  for (bool heavy : {true, false}) {
    const PhysicalParams p = base_params();
    const EquilibriumProfile prof = heavy ? rt_profile(p) : stable_profile(p);
    const GridPtr g = grid(16);
    const int m = g->mode_index(1, 0);
    const auto op = assemble_mode_operator({1.0, 0.0}, prof, p, *g);
    const auto gr = growth_rate(op);
    const Eigen::VectorXcd v = mode_eigenvector(op, gr.lambda_max);
    StepperOptions o;
    o.startup_steps = 0;
    const Stepper st(prof, p, g, o);
    FlattenedState s = FlattenedState::zero(g);
    const double scale = 1e-6 / v.cwiseAbs().maxCoeff();
    st.unpack(scale * v, m, s);
    st.unpack(scale * v.conjugate(), g->conjugate(m), s);
    const double n0 = st.pack(s, m).norm();
    const int steps = heavy ? 50 : 200;
    s = advance(st, s, steps);
    const double rate = std::log(st.pack(s, m).norm() / n0) / (steps * o.dt);
    const double rel = std::abs(rate / gr.lambda_max.real() - 1.0);
    ok = ok && rel <= 0.03;
    os << " " << (heavy ? "unstable" : "stable") << " eigen " << fmt("%.5e", gr.lambda_max.real()) << " simulated "
       << fmt("%.5e", rate) << " rel " << fmt("%.1e", rel) << ";";
  }
  return {ok, os.str()};
}

Outcome appendix_checks() {
  double vdm = 0.0;
  for (int m = 1; m <= 6; ++m) {
    vdm = std::max(vdm, default_vandermonde(m).max_residual);
    std::vector<double> lam(m + 1);
    for (int j = 0; j <= m; ++j) lam[j] = 0.5 + 0.75 * j;
    vdm = std::max(vdm, vandermonde_coefficients(lam, m).max_residual);
  }
  const KernelReport ker = deviatoric_kernel_check(grid(8), 20, 1);
  const KornReport k1 = korn_constant_estimate(grid(12));
  const KornReport k2 = korn_constant_estimate(grid(20));
  const PoissonBoundReport pb = poisson_bound_ratios(grid(40, 16), 100, 9);
  const double kr = k2.minimum / k1.minimum;
  std::ostringstream os;
  os << "vandermonde " << fmt("%.1e", vdm) << "; kernel residual " << fmt("%.1e", ker.max_residual) << " rank "
     << ker.rank << "; korn " << fmt("%.4f", k1.minimum) << " -> " << fmt("%.4f", k2.minimum) << "; poisson worst "
     << fmt("%.3f", pb.worst[0]) << " " << fmt("%.3f", pb.worst[1]) << " " << fmt("%.3f", pb.worst[2]);
  return {vdm <= 1e-10 && ker.max_residual <= 1e-10 && ker.unique_zero_solution() && k1.minimum > 0 &&
              std::abs(kr - 1.0) <= 0.1 && pb.pass(),
          os.str()};
}

Outcome equilibrium_formulas() {
  const PhysicalParams p = base_params();
  const auto lp = PressureLaw::polytropic(1, 2), lm = PressureLaw::polytropic(9, 2);
  const EquilibriumProfile a = build_equilibrium(lp, lm, p, 64, ProfilePath::automatic);
  const EquilibriumProfile b = build_equilibrium(lp, lm, p, 64, ProfilePath::generic);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.rho_plus.size(); ++i) diff = std::max(diff, std::abs(a.rho_plus[i] - b.rho_plus[i]));
  for (std::size_t i = 0; i < a.rho_minus.size(); ++i)
    diff = std::max(diff, std::abs(a.rho_minus[i] - b.rho_minus[i]));
  const MassPair m = equilibrium_masses(a, p);
  const double target = 5 * pi * pi;
  const double e1 = std::abs(m.plus_closed / target - 1.0), e2 = std::abs(m.plus_quadrature / target - 1.0);
  std::ostringstream os;
  os << "closed vs generic " << fmt("%.1e", diff) << "; M+ closed rel " << fmt("%.1e", e1) << ", quadrature rel "
     << fmt("%.1e", e2);
  return {diff <= 1e-10 && e1 <= 1e-8 && e2 <= 1e-8, os.str()};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"sigma_c reproduction", sigma_c_reproduction},
      {"sharp Poincare constant", sharp_poincare},
      {"stability table", stability_table},
      {"mass conservation", mass_conservation},
      {"energy-dissipation law order", energy_law_order},
      {"decay character", decay_character},
      {"vanishing surface tension limit", vanishing_sigma},
      {"linear/nonlinear rate consistency", modal_rates},
      {"appendix structure checks", appendix_checks},
      {"equilibrium formulas", equilibrium_formulas},
  };
  int failed = 0, index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2d %s: %s | %s\n", index, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
