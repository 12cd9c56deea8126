#include <CLI11.hpp>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rtwave/scenarios.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Layered compressible viscous flow: equilibria, stability and nonlinear runs"};
  std::string scenario, config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string names;
  for (const auto& n : rtwave::scenario_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("scenario", scenario, "One of: " + names)->required();
  app.add_option("--config", config_path, "Configuration file (key = value text or JSON)")->required();
  auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for random fields (overrides seed)");
  app.add_option("--threads", threads, "Worker threads for per-mode solves")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif
  try {
    const rtwave::Config cfg = rtwave::Config::load(config_path);
    rtwave::RunOptions opt;
    if (*out_opt) opt.out = out_dir;
    if (*seed_opt) opt.seed = seed;
    const auto dir = rtwave::run_scenario(scenario, cfg, opt);
    std::cout << scenario << ": outputs written to " << dir.string() << '\n';
    return 0;
  } catch (const rtwave::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << scenario << " failed: " << e.what() << '\n';
    return 3;
  }
}
