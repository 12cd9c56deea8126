#include "rtwave/scenarios.hpp"

#include <fftw3.h>
#include <openssl/crypto.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "rtwave/fitting.hpp"
#include "rtwave/functional_checks.hpp"
#include "rtwave/output.hpp"

namespace rtwave {

namespace fs = std::filesystem;
using nlohmann::json;

const char* rtwave_version() { return "1.0.0"; }

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"equilibrium", "stability-map",       "neutral-sigma", "simulate",
                                              "decay-fit",   "verify-inequalities", "sigma-limit"};
  return names;
}

namespace {

int to_int(long long v, const std::string& key, long long lo, long long hi) {
  if (v < lo || v > hi)
    throw ConfigError(key + ": must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
                      std::to_string(v));
  return static_cast<int>(v);
}

PressureLaw read_law(const Config& cfg, const std::string& p) {
  const std::string kind = cfg.get_string(p + ".kind");
  try {
    if (kind == "polytropic") return PressureLaw::polytropic(cfg.get_double(p + ".K"), cfg.get_double(p + ".alpha"));
    if (kind == "tabulated")
      return PressureLaw::tabulated(cfg.get_doubles(p + ".density"), cfg.get_doubles(p + ".pressure"));
  } catch (const DomainError& e) {
    throw ConfigError(p + ": " + e.what());
  }
  throw ConfigError(p + ".kind: expected polytropic or tabulated, got '" + kind + "'");
}

int parse_int_token(const std::string& t, const std::string& key) {
  int v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw ConfigError(key + ": expected an integer, got '" + t + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) out.push_back(part);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

std::array<int, 2> parse_mode_pair(const std::string& text, const std::string& key) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw ConfigError(key + ": expected 'n1:n2', got '" + text + "'");
  return {parse_int_token(parts[0], key), parse_int_token(parts[1], key)};
}

std::vector<SurfaceMode> read_modes(const Config& cfg, const std::string& key) {
  std::vector<SurfaceMode> out;
  if (!cfg.has(key)) return out;
  const auto items = cfg.get_strings(key);
  for (std::size_t i = 0; i < items.size(); ++i)
    out.push_back(parse_surface_mode(items[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

void check_modes(const std::vector<SurfaceMode>& modes, const Grid& g, const std::string& key) {
  for (const auto& m : modes)
    if (!g.dealiased(g.mode_index(m.n1, m.n2)))
      throw ConfigError(key + ": mode " + std::to_string(m.n1) + ":" + std::to_string(m.n2) +
                        " lies outside the dealiased band of the grid");
}

std::string versions_text() {
  std::ostringstream os;
  os << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  return os.str();
}

json manifest_info(const std::string& scenario, const Config& cfg, std::uint64_t seed) {
  return {{"scenario", scenario},
          {"seed", seed},
          {"config_sha256", sha256_hex(cfg.canonical())},
          {"versions",
           {{"rtwave", rtwave_version()},
            {"eigen", versions_text()},
            {"fftw", std::string(fftw_version)},
            {"openssl", std::string(OpenSSL_version(OPENSSL_VERSION))}}}};
}

// Finite values only; NaN and infinities become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_series(const fs::path& path, const std::vector<EnergyReport>& reports, int tier) {
  {
    std::ofstream note(path, std::ios::binary);
    if (!note) throw Error("cannot write " + path.string());
    note << "# " << energy_report_note(tier) << '\n';
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  out << "t,E,D,F_surrogate,physical_energy,mass_plus,mass_minus,residual,max_eta_amplitude\n";
  for (const auto& r : reports) {
    const double v[] = {r.time,        r.E_n_sigma,  r.D_n_sigma,           r.F_surrogate,      r.physical_energy,
                        r.mass_plus,   r.mass_minus, r.energy_law_residual, r.max_eta_amplitude};
    for (std::size_t i = 0; i < std::size(v); ++i) out << (i ? "," : "") << format_double(v[i]);
    out << '\n';
  }
}

double relative_mass_drift(const std::vector<EnergyReport>& reports, bool plus) {
  double worst = 0.0;
  const double m0 = plus ? reports.front().mass_plus : reports.front().mass_minus;
  for (const auto& r : reports) worst = std::max(worst, std::abs((plus ? r.mass_plus : r.mass_minus) - m0) / m0);
  return worst;
}

json fit_json(const DecayFit& f) {
  return {{"model", decay_model_name(f.model)}, {"rate", f.rate},           {"intercept", f.intercept},
          {"r_squared", f.r_squared},           {"window", {f.window_start, f.window_end}}, {"samples", f.samples}};
}

std::string checkpoint_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%07d.bin", step);
  return buf;
}

// Common head of every scenario: problem, seed and output location.
struct Common {
  std::uint64_t seed = 0;
  fs::path out;
};

Common read_common(const std::string& scenario, const Config& cfg, const RunOptions& opt) {
  Common c;
  if (cfg.has("scenario") && cfg.get_string("scenario") != scenario)
    throw ConfigError("scenario: config names '" + cfg.get_string("scenario") + "' but '" + scenario +
                      "' was requested");
  c.seed = cfg.get_uint64("seed", 0);
  if (opt.seed) c.seed = *opt.seed;
  const std::string dir = cfg.get_string("output_dir", "rtwave-" + scenario);
  c.out = opt.out ? *opt.out : fs::path(dir);
  if (c.out.empty()) throw ConfigError("output_dir: must not be empty");
  return c;
}

struct MapCell {
  double sigma_plus, sigma_minus, max_re;
  int n1, n2;
  std::string verdict, expected;
};

std::string classify(double re, double margin) {
  if (re < -margin) return "stable";
  if (re > margin) return "unstable";
  return "undecided";
}

std::string expected_verdict(double jump, double sigma_minus, double sigma_c) {
  if (jump < 0) return "stable";
  if (sigma_minus > sigma_c) return "stable";
  if (sigma_minus < sigma_c) return "unstable";
  return "undecidable";
}

void scenario_equilibrium(const Config& cfg, const Common& c) {
  const ProblemSetup setup = read_problem(cfg);
  cfg.reject_unused();
  const EquilibriumProfile prof = setup.profile();
  const MassPair m = equilibrium_masses(prof, setup.params);
  const AdmissibilityReport adm = check_admissibility(setup.law_plus, setup.law_minus, setup.params);

  json j{{"rho1", prof.rho1},
         {"rho_plus", prof.rho_top_of_interface},
         {"rho_minus", prof.rho_bot_of_interface},
         {"jump", prof.jump},
         {"sigma_c", prof.sigma_c},
         {"M_plus", prof.M_plus},
         {"M_minus", prof.M_minus},
         {"masses",
          {{"plus_quadrature", m.plus_quadrature},
           {"plus_closed", m.plus_closed},
           {"minus_quadrature", m.minus_quadrature},
           {"minus_closed", m.minus_closed}}},
         {"path", prof.path() == ProfilePath::generic ? "generic" : "automatic"}};
  json conds = json::array();
  for (int i = 0; i < 4; ++i) {
    const auto& a = adm.conditions[i];
    conds.push_back({{"index", i + 1}, {"passed", a.passed}, {"detail", a.detail}});
  }
  j["admissibility"] = conds;
  if (setup.law_plus.kind() == PressureLaw::Kind::polytropic &&
      setup.law_minus.kind() == PressureLaw::Kind::polytropic) {
    const EquilibriumProfile gen = build_equilibrium(setup.law_plus, setup.law_minus, setup.params,
                                                     setup.profile_samples, ProfilePath::generic);
    double diff = 0.0;
    for (std::size_t i = 0; i < prof.rho_plus.size(); ++i)
      diff = std::max(diff, std::abs(prof.rho_plus[i] - gen.rho_plus[i]));
    for (std::size_t i = 0; i < prof.rho_minus.size(); ++i)
      diff = std::max(diff, std::abs(prof.rho_minus[i] - gen.rho_minus[i]));
    j["closed_vs_generic_max_difference"] = diff;
  }

  StagedOutput out(c.out);
  write_json(out.path("equilibrium.json"), j);
  CsvWriter csv(out.path("profile.csv"), {"layer", "x3", "rho"});
  for (std::size_t i = 0; i < prof.x3_minus.size(); ++i) csv.row({"minus"}, {prof.x3_minus[i], prof.rho_minus[i]});
  for (std::size_t i = 0; i < prof.x3_plus.size(); ++i) csv.row({"plus"}, {prof.x3_plus[i], prof.rho_plus[i]});
  out.commit(manifest_info("equilibrium", cfg, c.seed));
}

void scenario_stability_map(const Config& cfg, const Common& c) {
  ProblemSetup setup = read_problem(cfg);
  std::vector<std::array<double, 2>> pairs;
  const auto items = cfg.get_strings("stability.cells");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string key = "stability.cells[" + std::to_string(i) + "]";
    const auto parts = split(items[i], ':');
    const auto a = parts.size() == 2 ? parse_number(parts[0]) : std::nullopt;
    const auto b = parts.size() == 2 ? parse_number(parts[1]) : std::nullopt;
    if (!a || !b) throw ConfigError(key + ": expected 'sigma_plus:sigma_minus', got '" + items[i] + "'");
    if (!(*a >= 0 && *b >= 0)) throw ConfigError(key + ": tensions must be >= 0");
    if ((*a == 0) != (*b == 0)) throw ConfigError(key + ": tensions must be both zero or both positive");
    pairs.push_back({*a, *b});
  }
  const int max_mode = to_int(cfg.get_int("stability.max_mode", 2), "stability.max_mode", 1, 64);
  const double margin = cfg.get_double("stability.margin", 1e-6);
  cfg.reject_unused();
  if (pairs.empty()) throw ConfigError("stability.cells: must not be empty");
  if (!(margin > 0)) throw ConfigError("stability.margin: must be > 0");
  const GridPtr grid = setup.make_grid();
  const EquilibriumProfile prof = setup.profile();
  const Background bg = sample_background(prof, *grid);

  std::vector<std::array<int, 2>> modes;
  for (int n1 = 0; n1 <= max_mode; ++n1)
    for (int n2 = -max_mode; n2 <= max_mode; ++n2) {
      if (n1 == 0 && n2 <= 0) continue;
      if (2 * std::max(std::abs(n1), std::abs(n2)) >= grid->nh()) continue;
      modes.push_back({n1, n2});
    }

  StagedOutput out(c.out);
  CsvWriter csv(out.path("stability_map.csv"), {"sigma_plus", "sigma_minus", "n1", "n2", "re_lambda", "im_lambda"});
  std::vector<MapCell> cells;
  for (const auto& [a, b] : pairs) {
    PhysicalParams p = setup.params;
    p.sigma_plus = a;
    p.sigma_minus = b;
    p.validate();
    MapCell cell{a, b, -1e300, 0, 0, "", ""};
    for (const auto& n : modes) {
      const std::array<double, 2> xi{n[0] / p.L1, n[1] / p.L2};
      const GrowthRateResult r = growth_rate(assemble_mode_operator(xi, bg, prof, p, *grid));
      csv.row({format_double(a), format_double(b), std::to_string(n[0]), std::to_string(n[1])},
              {r.lambda_max.real(), r.lambda_max.imag()});
      if (r.lambda_max.real() > cell.max_re) {
        cell.max_re = r.lambda_max.real();
        cell.n1 = n[0];
        cell.n2 = n[1];
      }
    }
    cell.verdict = classify(cell.max_re, margin);
    cell.expected = expected_verdict(prof.jump, b, prof.sigma_c);
    cells.push_back(cell);
  }
  json jc = json::array();
  int agree = 0, decidable = 0;
  for (const auto& cell : cells) {
    const bool dec = cell.expected != "undecidable";
    decidable += dec;
    agree += dec && cell.verdict == cell.expected;
    jc.push_back({{"sigma_plus", cell.sigma_plus},
                  {"sigma_minus", cell.sigma_minus},
                  {"max_re_lambda", cell.max_re},
                  {"argmax_mode", {cell.n1, cell.n2}},
                  {"verdict", cell.verdict},
                  {"expected", cell.expected}});
  }
  write_json(out.path("verdict.json"), {{"jump", prof.jump},
                                        {"sigma_c", prof.sigma_c},
                                        {"margin", margin},
                                        {"cells", jc},
                                        {"decidable_cells", decidable},
                                        {"agreeing_cells", agree},
                                        {"pass", agree == decidable}});
  out.commit(manifest_info("stability-map", cfg, c.seed));
}

void scenario_neutral_sigma(const Config& cfg, const Common& c) {
  const ProblemSetup setup = read_problem(cfg);
  std::vector<std::array<int, 2>> modes;
  if (cfg.has("neutral.modes")) {
    const auto items = cfg.get_strings("neutral.modes");
    for (std::size_t i = 0; i < items.size(); ++i)
      modes.push_back(parse_mode_pair(items[i], "neutral.modes[" + std::to_string(i) + "]"));
  } else {
    modes = {{1, 0}};
  }
  const std::vector<double> bracket = cfg.get_doubles("neutral.bracket", {});
  const double tol = cfg.get_double("neutral.tolerance", 0.02);
  cfg.reject_unused();
  if (modes.empty()) throw ConfigError("neutral.modes: must not be empty");
  for (const auto& m : modes)
    if (m[0] == 0 && m[1] == 0) throw ConfigError("neutral.modes: the mean mode has no neutral tension");
  if (!bracket.empty() && (bracket.size() != 2 || !(bracket[0] >= 0) || !(bracket[1] > bracket[0])))
    throw ConfigError("neutral.bracket: expected [lo, hi] with 0 <= lo < hi");
  const GridPtr grid = setup.make_grid();
  const EquilibriumProfile prof = setup.profile();
  if (!(prof.jump > 0)) throw ConfigError("laws: neutral-sigma requires a positive density jump");

  StagedOutput out(c.out);
  CsvWriter csv(out.path("neutral_sigma.csv"),
                {"n1", "n2", "xi_squared", "sigma_star", "prediction", "balance", "relative_error"});
  json rows = json::array();
  bool all_ok = true;
  double lowest_k2 = 1e300, lowest_star = 0.0;
  for (const auto& m : modes) {
    const std::array<double, 2> xi{m[0] / setup.params.L1, m[1] / setup.params.L2};
    const double k2 = xi[0] * xi[0] + xi[1] * xi[1];
    const double pred = prof.jump * setup.params.g / k2;
    const std::array<double, 2> br = bracket.empty() ? std::array<double, 2>{0.0, 2.0 * pred}
                                                     : std::array<double, 2>{bracket[0], bracket[1]};
    const NeutralSigmaResult r = find_neutral_sigma(prof, setup.params, *grid, xi, br);
    const double balance = r.sigma_star * k2 / (prof.jump * setup.params.g);
    const double err = std::abs(balance - 1.0);
    all_ok = all_ok && err <= tol;
    csv.row({std::to_string(m[0]), std::to_string(m[1])}, {k2, r.sigma_star, pred, balance, err});
    rows.push_back({{"mode", {m[0], m[1]}}, {"sigma_star", r.sigma_star}, {"balance", balance},
                    {"evaluations", r.evaluations}});
    if (k2 < lowest_k2) {
      lowest_k2 = k2;
      lowest_star = r.sigma_star;
    }
  }
  // sigma_c is the neutral tension of the lattice mode with the smallest |xi|.
  const double lattice_min = 1.0 / setup.params.max_L2();
  const bool lowest_is_critical = std::abs(lowest_k2 - lattice_min) <= 1e-12 * lattice_min;
  json v{{"sigma_c", prof.sigma_c}, {"modes", rows}, {"tolerance", tol}, {"per_mode_pass", all_ok}};
  if (lowest_is_critical) {
    const double rel = std::abs(lowest_star / prof.sigma_c - 1.0);
    v["sigma_star"] = lowest_star;
    v["relative_error"] = rel;
    v["pass"] = all_ok && rel <= tol;
  } else {
    v["sigma_star"] = nullptr;
    v["relative_error"] = nullptr;
    v["pass"] = all_ok;
  }
  write_json(out.path("verdict.json"), v);
  out.commit(manifest_info("neutral-sigma", cfg, c.seed));
}

struct SimulationInputs {
  ProblemSetup setup;
  InitialData initial;
  SimulationOptions sim;
};

SimulationInputs read_simulation_inputs(const Config& cfg) {
  SimulationInputs in{read_problem(cfg), read_initial(cfg), read_simulation(cfg)};
  const GridPtr grid = in.setup.make_grid();
  check_modes(in.initial.eta_plus, *grid, "initial.eta_plus");
  check_modes(in.initial.eta_minus, *grid, "initial.eta_minus");
  return in;
}

json simulation_summary(const SimulationResult& r, const EquilibriumProfile& prof, const SimulationOptions& o) {
  return {{"steps", r.steps_taken},
          {"dt", o.stepper.dt},
          {"scheme", scheme_name(o.stepper.scheme)},
          {"tier", o.tier},
          {"final_time", r.final_state.time},
          {"jump", prof.jump},
          {"sigma_c", prof.sigma_c},
          {"mass_drift_plus", relative_mass_drift(r.reports, true)},
          {"mass_drift_minus", relative_mass_drift(r.reports, false)},
          {"E_initial", r.reports.front().E_n_sigma},
          {"E_final", r.reports.back().E_n_sigma},
          {"physical_energy_initial", r.reports.front().physical_energy},
          {"physical_energy_final", r.reports.back().physical_energy}};
}

void scenario_simulate(const Config& cfg, const Common& c) {
  const SimulationInputs in = read_simulation_inputs(cfg);
  cfg.reject_unused();
  const GridPtr grid = in.setup.make_grid();
  const EquilibriumProfile prof = in.setup.profile();
  const FlattenedState s0 = make_initial_state(in.initial, grid, prof, c.seed);

  StagedOutput out(c.out);
  if (in.sim.checkpoint_every > 0) fs::create_directories(out.path("checkpoints"));
  const SimulationResult r = run_simulation(prof, in.setup.params, grid, s0, in.sim, [&](const FlattenedState& s, int k) {
    write_checkpoint(out.path("checkpoints") / checkpoint_name(k), s);
  });
  write_series(out.path("series.csv"), r.reports, in.sim.tier);
  write_checkpoint(out.path("final_state.bin"), r.final_state);
  write_json(out.path("summary.json"), simulation_summary(r, prof, in.sim));
  out.commit(manifest_info("simulate", cfg, c.seed));
}

void scenario_decay_fit(const Config& cfg, const Common& c) {
  const SimulationInputs in = read_simulation_inputs(cfg);
  const double frac = cfg.get_double("decay.transient_fraction", 0.2);
  const double rel_tol = cfg.get_double("decay.monotone_tolerance", 0.0);
  cfg.reject_unused();
  if (!(frac >= 0 && frac < 1)) throw ConfigError("decay.transient_fraction: must lie in [0, 1)");
  if (!(rel_tol >= 0)) throw ConfigError("decay.monotone_tolerance: must be >= 0");
  if (in.sim.steps / in.sim.sample_every + 1 < 20)
    throw ConfigError("time.steps: decay fits need at least 20 samples");
  const GridPtr grid = in.setup.make_grid();
  const EquilibriumProfile prof = in.setup.profile();
  const FlattenedState s0 = make_initial_state(in.initial, grid, prof, c.seed);

  StagedOutput out(c.out);
  const SimulationResult r = run_simulation(prof, in.setup.params, grid, s0, in.sim);
  std::vector<double> t, e;
  for (const auto& rep : r.reports) {
    t.push_back(rep.time);
    e.push_back(rep.E_n_sigma);
  }
  const DecayFit fe = fit_decay(t, e, DecayModel::exponential, frac);
  const DecayFit fa = fit_decay(t, e, DecayModel::algebraic, frac);
  write_series(out.path("series.csv"), r.reports, in.sim.tier);
  write_json(out.path("fit.json"), {{"quantity", "E"},
                                    {"transient_fraction", frac},
                                    {"exponential", fit_json(fe)},
                                    {"algebraic", fit_json(fa)},
                                    {"nonincreasing_after_transient", nonincreasing_after(e, frac, rel_tol)},
                                    {"summary", simulation_summary(r, prof, in.sim)}});
  out.commit(manifest_info("decay-fit", cfg, c.seed));
}

void scenario_verify(const Config& cfg, const Common& c) {
  const ProblemSetup setup = read_problem(cfg);
  const int extra = to_int(cfg.get_int("inequalities.korn_extra_nodes", 8), "inequalities.korn_extra_nodes", 1, 64);
  const int ksamples = to_int(cfg.get_int("inequalities.kernel_samples", 20), "inequalities.kernel_samples", 1, 100000);
  const int trials = to_int(cfg.get_int("inequalities.poisson_trials", 100), "inequalities.poisson_trials", 1, 100000);
  const int max_m = to_int(cfg.get_int("inequalities.vandermonde_max_m", 6), "inequalities.vandermonde_max_m", 1, 12);
  cfg.reject_unused();
  const GridPtr grid = setup.make_grid();
  const EquilibriumProfile prof = setup.profile();

  const double poincare = sharp_poincare_constant(*grid);
  const double poincare_exact = 1.0 / setup.params.max_L2();
  const PositivityReport pos = energy_form_positivity(prof, setup.params, *grid, true);
  const KornReport k1 = korn_constant_estimate(grid);
  GridSpec fine = grid->spec();
  fine.n_v_plus += extra;
  fine.n_v_minus += extra;
  const KornReport k2 = korn_constant_estimate(Grid::make(fine));
  const KornReport kfree = korn_constant_estimate(grid, false);
  const KernelReport ker = deviatoric_kernel_check(grid, ksamples, c.seed + 1);
  const PoissonBoundReport pb = poisson_bound_ratios(grid, trials, c.seed + 9);
  json vdm = json::array();
  double vdm_worst = 0.0;
  for (int m = 1; m <= max_m; ++m) {
    const VandermondeCoeffs v = default_vandermonde(m);
    vdm_worst = std::max(vdm_worst, v.max_residual);
    vdm.push_back({{"m", m}, {"max_residual", v.max_residual}, {"alphas", v.alphas}});
  }
  const double korn_ratio = k2.minimum / k1.minimum;
  json j{{"poincare",
          {{"computed", poincare}, {"exact", poincare_exact}, {"abs_error", std::abs(poincare - poincare_exact)},
           {"pass", std::abs(poincare - poincare_exact) <= 1e-12}}},
         {"energy_positivity",
          {{"min_quotient", pos.min_quotient}, {"positive", pos.positive},
           {"argmin_mode", {pos.argmin_mode[0], pos.argmin_mode[1]}}}},
         {"korn",
          {{"minimum", k1.minimum}, {"mode", {k1.n1, k1.n2}}, {"minimum_refined", k2.minimum},
           {"refined_extra_nodes", extra}, {"ratio", korn_ratio}, {"free_bottom_minimum", kfree.minimum},
           {"pass", k1.minimum > 0 && std::abs(korn_ratio - 1.0) <= 0.1}}},
         {"deviatoric_kernel",
          {{"samples", ker.samples}, {"max_residual", ker.max_residual}, {"rank", ker.rank},
           {"unique_zero_solution", ker.unique_zero_solution()},
           {"pass", ker.max_residual < 1e-10 && ker.unique_zero_solution()}}},
         {"poisson_bounds",
          {{"trials", pb.trials}, {"worst", pb.worst}, {"bound", pb.bound}, {"pass", pb.pass()}}},
         {"vandermonde", {{"cases", vdm}, {"max_residual", vdm_worst}, {"pass", vdm_worst <= 1e-10}}}};
  StagedOutput out(c.out);
  write_json(out.path("inequalities.json"), j);
  out.commit(manifest_info("verify-inequalities", cfg, c.seed));
}

void scenario_sigma_limit(const Config& cfg, const Common& c) {
  const SimulationInputs in = read_simulation_inputs(cfg);
  const auto seq = cfg.get_doubles("sigma_limit.sequence", {0.1, 0.05, 0.025});
  cfg.reject_unused();
  if (seq.empty()) throw ConfigError("sigma_limit.sequence: must not be empty");
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!(seq[i] > 0)) throw ConfigError("sigma_limit.sequence: values must be > 0");
    if (i > 0 && !(seq[i] < seq[i - 1])) throw ConfigError("sigma_limit.sequence: values must decrease");
  }
  const GridPtr grid = in.setup.make_grid();
  const EquilibriumProfile prof = in.setup.profile();
  if (!(prof.jump < 0)) throw ConfigError("laws: sigma-limit requires a negative density jump");
  const FlattenedState s0 = make_initial_state(in.initial, grid, prof, c.seed);

  StagedOutput out(c.out);
  const SigmaLimitReport r = sigma_limit_experiment(in.setup, s0, in.sim, seq);
  CsvWriter csv(out.path("sigma_limit.csv"), {"sigma", "distance"});
  for (std::size_t i = 0; i < r.distances.size(); ++i) csv.row({r.sigmas[i], r.distances[i]});
  json j{{"sigmas", r.sigmas},         {"distances", r.distances}, {"monotone", r.monotone},
         {"order", num(r.order)},      {"incomplete", r.incomplete}, {"failure", r.failure},
         {"terminal_time", in.sim.steps * in.sim.stepper.dt}, {"norm", "tier-0 distance of terminal states"}};
  write_json(out.path("sigma_limit.json"), j);
  out.commit(manifest_info("sigma-limit", cfg, c.seed));
}

}  // namespace

EquilibriumProfile ProblemSetup::profile() const {
  return build_equilibrium(law_plus, law_minus, params, profile_samples, path);
}

GridPtr ProblemSetup::make_grid() const { return Grid::make(grid); }

ProblemSetup read_problem(const Config& cfg) {
  ProblemSetup s;
  if (!cfg.has_block("laws.plus")) throw ConfigError("laws.plus: missing required block");
  if (!cfg.has_block("laws.minus")) throw ConfigError("laws.minus: missing required block");
  s.law_plus = read_law(cfg, "laws.plus");
  s.law_minus = read_law(cfg, "laws.minus");
  PhysicalParams& p = s.params;
  p.g = cfg.get_double("params.g", p.g);
  p.p_atm = cfg.get_double("params.p_atm", p.p_atm);
  p.ell = cfg.get_double("params.ell", p.ell);
  p.b = cfg.get_double("params.b", p.b);
  p.L1 = cfg.get_double("params.L1", p.L1);
  p.L2 = cfg.get_double("params.L2", p.L2);
  p.mu_plus = cfg.get_double("params.mu_plus", p.mu_plus);
  p.mu_minus = cfg.get_double("params.mu_minus", p.mu_minus);
  p.bulk_plus = cfg.get_double("params.bulk_plus", p.bulk_plus);
  p.bulk_minus = cfg.get_double("params.bulk_minus", p.bulk_minus);
  p.sigma_plus = cfg.get_double("params.sigma_plus", p.sigma_plus);
  p.sigma_minus = cfg.get_double("params.sigma_minus", p.sigma_minus);
  p.validate();

  GridSpec& g = s.grid;
  g.L1 = p.L1;
  g.L2 = p.L2;
  g.ell = p.ell;
  g.b = p.b;
  g.n_h = to_int(cfg.get_int("grid.n_h", 8), "grid.n_h", 4, 1024);
  const int nv = to_int(cfg.get_int("grid.n_v", 16), "grid.n_v", 8, 1024);
  g.n_v_plus = to_int(cfg.get_int("grid.n_v_plus", nv), "grid.n_v_plus", 8, 1024);
  g.n_v_minus = to_int(cfg.get_int("grid.n_v_minus", nv), "grid.n_v_minus", 8, 1024);
  if (g.n_h % 2 != 0) throw ConfigError("grid.n_h: must be even");

  s.profile_samples = to_int(cfg.get_int("equilibrium.samples", 64), "equilibrium.samples", 8, 100000);
  const std::string path = cfg.get_string("equilibrium.path", "automatic");
  if (path == "automatic") s.path = ProfilePath::automatic;
  else if (path == "generic") s.path = ProfilePath::generic;
  else throw ConfigError("equilibrium.path: expected automatic or generic, got '" + path + "'");
  return s;
}

SurfaceMode parse_surface_mode(const std::string& text, const std::string& key) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError(key + ": expected 'n1:n2:amplitude', got '" + text + "'");
  SurfaceMode m;
  m.n1 = parse_int_token(parts[0], key);
  m.n2 = parse_int_token(parts[1], key);
  const auto a = parse_number(parts[2]);
  if (!a) throw ConfigError(key + ": expected a numeric amplitude, got '" + parts[2] + "'");
  m.amplitude = *a;
  return m;
}

InitialData read_initial(const Config& cfg) {
  InitialData d;
  d.eta_plus = read_modes(cfg, "initial.eta_plus");
  d.eta_minus = read_modes(cfg, "initial.eta_minus");
  d.velocity_amplitude = cfg.get_double("initial.velocity_amplitude", 0.0);
  d.velocity_max_mode = to_int(cfg.get_int("initial.velocity_max_mode", 1), "initial.velocity_max_mode", 0, 64);
  if (!(d.velocity_amplitude >= 0)) throw ConfigError("initial.velocity_amplitude: must be >= 0");
  return d;
}

FlattenedState make_initial_state(const InitialData& data, const GridPtr& grid, const EquilibriumProfile& profile,
                                  std::uint64_t seed) {
  FlattenedState s = FlattenedState::zero(grid);
  const double L1 = grid->L1(), L2 = grid->L2();
  auto surface = [&](const std::vector<SurfaceMode>& modes, Surface which) {
    return SurfaceField::from_function(grid, which, [&](double x, double y) {
      double v = 0.0;
      for (const auto& m : modes) v += m.amplitude * std::cos(m.n1 * x / L1 + m.n2 * y / L2);
      return v;
    });
  };
  s.eta_plus = surface(data.eta_plus, Surface::plus);
  s.eta_minus = surface(data.eta_minus, Surface::minus);

  if (data.velocity_amplitude > 0) {
    struct Term {
      int n1, n2;
      double a, b, c1, c2;
    };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const int M = data.velocity_max_mode;
    std::array<std::vector<Term>, 3> terms;
    for (int c = 0; c < 3; ++c)
      for (int n1 = -M; n1 <= M; ++n1)
        for (int n2 = -M; n2 <= M; ++n2) {
          Term t{n1, n2, 0, 0, 0, 0};
          t.a = U(rng);
          t.b = U(rng);
          t.c1 = U(rng);
          t.c2 = U(rng);
          terms[c].push_back(t);
        }
    const double h = grid->ell() + grid->b();
    VectorField psi;
    for (int c = 0; c < 3; ++c)
      psi[c] = VolumeField::from_function(grid, [&](Layer, double x, double y, double z) {
        const double zz = z / h;
        double v = 0.0;
        for (const auto& t : terms[c]) {
          const double ph = t.n1 * x / L1 + t.n2 * y / L2;
          v += (t.a * std::cos(ph) + t.b * std::sin(ph)) * (1.0 + t.c1 * zz + t.c2 * zz * zz);
        }
        return v;
      });
    s.u[0] = d_dir(psi[2], 2) - d_dir(psi[1], 3);
    s.u[1] = d_dir(psi[0], 3) - d_dir(psi[2], 1);
    s.u[2] = d_dir(psi[1], 1) - d_dir(psi[0], 2);
    double umax = 0.0;
    for (int c = 0; c < 3; ++c) umax = std::max(umax, s.u[c].physical().max_abs());
    if (umax > 0)
      for (int c = 0; c < 3; ++c) s.u[c] *= data.velocity_amplitude / umax;
  }
  return project_initial(s, profile);
}

SimulationOptions read_simulation(const Config& cfg) {
  SimulationOptions o;
  o.stepper.scheme = parse_scheme(cfg.get_string("time.scheme", "imex1"));
  o.stepper.dt = cfg.get_double("time.dt", o.stepper.dt);
  o.stepper.cfl = cfg.get_double("time.cfl", o.stepper.cfl);
  o.stepper.startup_steps = to_int(cfg.get_int("time.startup_steps", o.stepper.startup_steps), "time.startup_steps", 0, 1000);
  o.steps = to_int(cfg.get_int("time.steps", o.steps), "time.steps", 1, 100000000);
  o.tier = to_int(cfg.get_int("energy.tier", 0), "energy.tier", 0, 1);
  o.sample_every = to_int(cfg.get_int("energy.sample_every", 1), "energy.sample_every", 1, 100000000);
  o.checkpoint_every = to_int(cfg.get_int("output.checkpoint_every", 0), "output.checkpoint_every", 0, 100000000);
  if (!(o.stepper.dt > 0)) throw ConfigError("time.dt: must be > 0");
  if (!(o.stepper.cfl > 0)) throw ConfigError("time.cfl: must be > 0");
  return o;
}

SimulationResult run_simulation(const EquilibriumProfile& profile, const PhysicalParams& params, const GridPtr& grid,
                                FlattenedState initial, const SimulationOptions& opt,
                                const std::function<void(const FlattenedState&, int)>& checkpoint) {
  const Stepper stepper(profile, params, grid, opt.stepper);
  EnergyMonitor monitor(profile, params, grid, opt.tier, opt.stepper.dt);
  SimulationResult r;
  r.reports.push_back(monitor.push(initial));
  r.final_state = advance(stepper, std::move(initial), opt.steps, [&](const FlattenedState& s, int step) {
    const EnergyReport rep = monitor.push(s);
    if (step % opt.sample_every == 0) r.reports.push_back(rep);
    if (checkpoint && opt.checkpoint_every > 0 && step % opt.checkpoint_every == 0) checkpoint(s, step);
    r.steps_taken = step;
  });
  return r;
}

double tier0_distance(const FlattenedState& a, const FlattenedState& b) {
  const FlattenedState d = a - b;
  double s = 0.0;
  for (int c = 0; c < 3; ++c) s += std::pow(sobolev_norm_volume(d.u[c], 0), 2);
  s += std::pow(sobolev_norm_volume(d.q, 0), 2);
  s += std::pow(sobolev_norm_surface(d.eta_plus, 0), 2) + std::pow(sobolev_norm_surface(d.eta_minus, 0), 2);
  return std::sqrt(s);
}

SigmaLimitReport sigma_limit_experiment(const ProblemSetup& setup, const FlattenedState& initial,
                                        const SimulationOptions& opt, const std::vector<double>& sequence) {
  SigmaLimitReport rep;
  const GridPtr grid = initial.grid();
  auto terminal = [&](double sigma) {
    PhysicalParams p = setup.params;
    p.sigma_plus = p.sigma_minus = sigma;
    const EquilibriumProfile prof = build_equilibrium(setup.law_plus, setup.law_minus, p, setup.profile_samples,
                                                      setup.path);
    return run_simulation(prof, p, grid, initial, opt).final_state;
  };
  FlattenedState ref;
  try {
    ref = terminal(0.0);
  } catch (const Error& e) {
    rep.incomplete = true;
    rep.failure = std::string("sigma = 0: ") + e.what();
    return rep;
  }
  for (double s : sequence) {
    try {
      const FlattenedState f = terminal(s);
      rep.sigmas.push_back(s);
      rep.distances.push_back(tier0_distance(f, ref));
    } catch (const Error& e) {
      rep.incomplete = true;
      rep.failure = "sigma = " + format_double(s) + ": " + e.what();
    }
  }
  rep.monotone = rep.distances.size() == sequence.size();
  for (std::size_t i = 1; i < rep.distances.size(); ++i) rep.monotone = rep.monotone && rep.distances[i] < rep.distances[i - 1];
  bool positive = rep.distances.size() >= 2;
  for (double d : rep.distances) positive = positive && d > 0;
  rep.order = positive ? log_log_slope(rep.sigmas, rep.distances) : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

fs::path run_scenario(const std::string& scenario, const Config& cfg, const RunOptions& opt) {
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), scenario) == names.end())
    throw ConfigError("scenario: unknown scenario '" + scenario + "'");
  const Common c = read_common(scenario, cfg, opt);
  if (scenario == "equilibrium") scenario_equilibrium(cfg, c);
  else if (scenario == "stability-map") scenario_stability_map(cfg, c);
  else if (scenario == "neutral-sigma") scenario_neutral_sigma(cfg, c);
  else if (scenario == "simulate") scenario_simulate(cfg, c);
  else if (scenario == "decay-fit") scenario_decay_fit(cfg, c);
  else if (scenario == "verify-inequalities") scenario_verify(cfg, c);
  else scenario_sigma_limit(cfg, c);
  return c.out;
}

}  // namespace rtwave
