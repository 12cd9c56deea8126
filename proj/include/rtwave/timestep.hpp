#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "rtwave/linear_stability.hpp"
#include "rtwave/nonlinear.hpp"

namespace rtwave {

enum class Scheme { imex1, imex2 };

const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

struct StepperOptions {
  Scheme scheme = Scheme::imex1;
  double dt = 1e-2;
  /// dt must not exceed cfl * (min grid spacing)^2 / (max viscosity).
  double cfl = 1000.0;
  /// imex2 only: the first steps of a run are taken as two backward Euler
  /// half steps each, which damps the stiff components of unprepared data.
  int startup_steps = 2;
};

/// Advances the perturbation system: constant-coefficient part implicit, per
/// horizontal mode, with one cached LU per retained mode; nonlinear forcing
/// explicit. Only modes inside the 2/3 band are evolved.
class Stepper {
 public:
  Stepper(const EquilibriumProfile& profile, const PhysicalParams& params, GridPtr grid,
          const StepperOptions& opt);

  /// One step. Throws GeometryBreakdownError when the new surfaces fail the
  /// smallness check, NumericalError when a solve produces non-finite values.
  /// damped selects the startup form of imex2 and is ignored by imex1.
  FlattenedState step(const FlattenedState& state, bool damped = false) const;

  const StepperOptions& options() const { return opt_; }
  const Background& background() const { return bg_; }
  const GridPtr& grid() const { return grid_; }

  /// Forcing vector of one mode in the row order of the mode operator.
  Eigen::VectorXcd forcing(const NonlinearTerms& G, int mode) const;
  Eigen::VectorXcd pack(const FlattenedState& s, int mode) const;
  void unpack(const Eigen::VectorXcd& x, int mode, FlattenedState& s) const;

 private:
  struct ModeData {
    int mode;
    int mirror;
    ModeOperator op;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
  };

  NonlinearTerms forcing_terms(const FlattenedState& s) const;
  FlattenedState half_euler(const FlattenedState& s) const;

  EquilibriumProfile profile_;
  PhysicalParams params_;
  GridPtr grid_;
  StepperOptions opt_;
  Background bg_;
  std::vector<ModeData> modes_;
};

/// Enforces [[u]] = 0 at the interface and u = 0 at the bottom with smooth
/// vertical ramps, truncates to the 2/3 band, then shifts the mean of q in
/// each layer so the layer masses equal the equilibrium masses.
FlattenedState project_initial(FlattenedState s, const EquilibriumProfile& profile);

/// Takes the given number of steps, applying the startup form on the first
/// options().startup_steps of them; observer(state, k) sees every new state.
FlattenedState advance(const Stepper& stepper, FlattenedState s, int steps,
                       const std::function<void(const FlattenedState&, int)>& observer = {});

/// Mass of one layer, the integral of rho J.
double layer_mass(const FlattenedState& s, const GeometryFields& geo, const Background& bg, Layer l);

}  // namespace rtwave
