#pragma once

#include <array>

#include "rtwave/background.hpp"
#include "rtwave/equilibrium.hpp"
#include "rtwave/geometry.hpp"

namespace rtwave {

/// Perturbation unknowns in flattened coordinates. q = rho - rho_bar - d3(rho_bar) theta.
struct FlattenedState {
  VolumeField q;
  VectorField u;
  SurfaceField eta_plus;
  SurfaceField eta_minus;
  double time = 0.0;

  static FlattenedState zero(const GridPtr& grid);
  const GridPtr& grid() const { return q.grid(); }
  FlattenedState& operator+=(const FlattenedState& o);
  FlattenedState& operator*=(double s);
  /// Largest coefficient magnitude over all components.
  double max_abs_coeff() const;
};

FlattenedState operator-(FlattenedState a, const FlattenedState& b);

/// Integral remainder of the pressure expansion about rho_bar for a density
/// increment delta = q + d3(rho_bar) theta:
/// delta^2 int_0^1 (1 - s) P''(rho_bar + s delta) ds.
/// Throws StateValidityError when rho_bar + delta leaves the law's domain.
PhysField taylor_remainder(const PhysField& delta, const EquilibriumProfile& profile, const Background& bg);
VolumeField taylor_remainder(const VolumeField& q, const VolumeField& theta, const EquilibriumProfile& profile);

struct NonlinearTerms {
  VolumeField G1;
  VectorField G2;
  std::array<SurfaceField, 3> G3_plus;
  std::array<SurfaceField, 3> G3_minus;
  SurfaceField G4_plus;
  SurfaceField G4_minus;
  /// Quantities the forcing was built from.
  VectorField dt_u;
  SurfaceField dt_eta_plus, dt_eta_minus;
  VolumeField remainder;
};

/// Forcing of the constant-coefficient perturbation system, so that the
/// linear equations with these right-hand sides are equivalent to the full
/// equations in flattened coordinates. Products are formed in physical space
/// and the results truncated to the 2/3 band. The velocity time derivative in
/// the momentum forcing is taken from the momentum equation itself.
NonlinearTerms nonlinear_terms(const FlattenedState& state, const GeometryFields& fields,
                               const EquilibriumProfile& profile, const PhysicalParams& params,
                               const Background& bg);

NonlinearTerms nonlinear_terms(const FlattenedState& state, const GeometryFields& fields,
                               const EquilibriumProfile& profile, const PhysicalParams& params);

}  // namespace rtwave
