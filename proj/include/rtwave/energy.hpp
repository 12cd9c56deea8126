#pragma once

#include <deque>
#include <limits>
#include <string>

#include "rtwave/timestep.hpp"

namespace rtwave {

struct EnergyReport {
  int tier = 0;
  double time = 0.0;
  double E_n_sigma = 0.0;
  double D_n_sigma = 0.0;
  double F_surrogate = 0.0;
  /// Physical energy minus its equilibrium value.
  double physical_energy = 0.0;
  double physical_dissipation = 0.0;
  double mass_plus = 0.0;
  double mass_minus = 0.0;
  /// (E(t_n) - E(t_{n-2})) / (2 dt) + D(t_{n-1}); NaN until three samples exist.
  double energy_law_residual = std::numeric_limits<double>::quiet_NaN();
  double max_eta_amplitude = 0.0;
};

/// Header line describing the surrogate tiers, written at the top of every report.
std::string energy_report_note(int tier);

/// Physical energy relative to equilibrium, evaluated without cancellation.
double physical_energy(const FlattenedState& s, const GeometryFields& geo, const EquilibriumProfile& profile,
                       const PhysicalParams& params, const Background& bg);

/// Viscous dissipation integral of the deviatoric and bulk parts.
double physical_dissipation(const FlattenedState& s, const GeometryFields& geo, const PhysicalParams& params);

/// Tracks a trajectory sampled every dt and evaluates the tier-n surrogates,
/// replacing time derivatives by difference quotients of stored states.
class EnergyMonitor {
 public:
  EnergyMonitor(const EquilibriumProfile& profile, const PhysicalParams& params, GridPtr grid, int tier,
                double dt);

  EnergyReport push(const FlattenedState& s);
  int tier() const { return tier_; }

 private:
  EquilibriumProfile profile_;
  PhysicalParams params_;
  GridPtr grid_;
  int tier_;
  double dt_;
  Background bg_;
  std::array<std::vector<double>, 2> R_, dR_;
  std::deque<FlattenedState> history_;
  std::deque<double> energies_, dissipations_;
};

/// Reports for the last state of a history sampled every dt (at most the last three states are used).
EnergyReport energy_functionals(const std::vector<FlattenedState>& history, double dt,
                                const EquilibriumProfile& profile, const PhysicalParams& params, int tier);

}  // namespace rtwave
