#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rtwave/config.hpp"
#include "rtwave/energy.hpp"

namespace rtwave {

const char* rtwave_version();

/// Scenario names accepted by run_scenario.
const std::vector<std::string>& scenario_names();

struct ProblemSetup {
  PressureLaw law_plus = PressureLaw::polytropic(1.0, 2.0);
  PressureLaw law_minus = PressureLaw::polytropic(1.0, 2.0);
  PhysicalParams params;
  GridSpec grid;
  int profile_samples = 64;
  ProfilePath path = ProfilePath::automatic;

  EquilibriumProfile profile() const;
  GridPtr make_grid() const;
};

/// Reads [laws.plus], [laws.minus] (both required), [params], [grid] and [equilibrium].
ProblemSetup read_problem(const Config& cfg);

/// eta = amplitude cos(n1 x1 / L1 + n2 x2 / L2).
struct SurfaceMode {
  int n1 = 0, n2 = 0;
  double amplitude = 0.0;
};

/// Parses "n1:n2:amplitude"; key names the config entry in error messages.
SurfaceMode parse_surface_mode(const std::string& text, const std::string& key);

struct InitialData {
  std::vector<SurfaceMode> eta_plus, eta_minus;
  /// Largest physical velocity of the random seed field before projection.
  double velocity_amplitude = 0.0;
  /// Seed potentials use horizontal modes |n_j| <= velocity_max_mode.
  int velocity_max_mode = 1;
};

InitialData read_initial(const Config& cfg);

/// Surface modes as given, velocity from the curl of a random low-mode vector
/// potential drawn from seed, then projected onto the interface and bottom
/// constraints with the equilibrium layer masses.
FlattenedState make_initial_state(const InitialData& data, const GridPtr& grid, const EquilibriumProfile& profile,
                                  std::uint64_t seed);

struct SimulationOptions {
  StepperOptions stepper;
  int steps = 100;
  int tier = 0;
  /// Reports are kept every sample_every steps (the initial state is always kept).
  int sample_every = 1;
  /// Checkpoint cadence in steps, 0 for none.
  int checkpoint_every = 0;
};

/// Reads [time], [energy] and [output].
SimulationOptions read_simulation(const Config& cfg);

struct SimulationResult {
  std::vector<EnergyReport> reports;
  FlattenedState final_state;
  int steps_taken = 0;
};

/// Throws GeometryBreakdownError or StateValidityError when the run leaves the
/// admissible regime. checkpoint(state, step) is called at the cadence.
SimulationResult run_simulation(const EquilibriumProfile& profile, const PhysicalParams& params, const GridPtr& grid,
                                FlattenedState initial, const SimulationOptions& opt,
                                const std::function<void(const FlattenedState&, int)>& checkpoint = {});

/// (|u|_0^2 + |q|_0^2 + |eta+|_0^2 + |eta-|_0^2)^(1/2) of a - b.
double tier0_distance(const FlattenedState& a, const FlattenedState& b);

struct SigmaLimitReport {
  std::vector<double> sigmas;
  std::vector<double> distances;
  bool monotone = false;
  double order = 0.0;
  bool incomplete = false;
  std::string failure;
};

/// Runs the simulation with sigma_plus = sigma_minus = s for every s in the
/// sequence and for s = 0 from identical data; distances of terminal states.
SigmaLimitReport sigma_limit_experiment(const ProblemSetup& setup, const FlattenedState& initial,
                                        const SimulationOptions& opt, const std::vector<double>& sequence);

struct RunOptions {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
};

/// Validates the whole configuration for the scenario, runs it and writes the
/// outputs with MANIFEST.json. Nothing is written when validation or the run fails.
/// Returns the output directory.
std::filesystem::path run_scenario(const std::string& scenario, const Config& cfg, const RunOptions& opt = {});

}  // namespace rtwave
