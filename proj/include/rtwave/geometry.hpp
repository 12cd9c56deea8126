#pragma once

#include <array>
#include <string>
#include <vector>

#include "rtwave/fields.hpp"

namespace rtwave {

struct VandermondeCoeffs {
  std::vector<double> lambdas;
  std::vector<double> alphas;
  /// max_i |sum_j alpha_j (-lambda_j)^i - 1|
  double max_residual = 0.0;
  int m() const { return static_cast<int>(lambdas.size()) - 1; }
};

/// Solves V alpha = 1 with V_ij = (-lambda_j)^i, i, j = 0..m. Throws
/// NumericalError on repeated or nonpositive lambdas.
VandermondeCoeffs vandermonde_coefficients(const std::vector<double>& lambdas, int m);

/// lambda_j = j + 1.
VandermondeCoeffs default_vandermonde(int m = 4);

/// Sum over xi of exp(i xi.x') exp(|xi| (x3 - ell)) eta^(xi), on both layers.
VolumeField poisson_extend_upper(const SurfaceField& eta_plus, const GridPtr& grid);

/// exp(|xi| x3) below the interface and sum_j alpha_j exp(-|xi| lambda_j x3) above.
VolumeField poisson_extend_lower(const SurfaceField& eta_minus, const VandermondeCoeffs& coeffs,
                                 const GridPtr& grid);

/// Quintic smoothstep 10t^3 - 15t^4 + 6t^5 clamped to [0, 1], and derivatives.
double smoothstep(double t);
double smoothstep_d1(double t);

/// Blending profiles: b1 is 1 at the top and 0 at the interface and bottom,
/// b2 is 1 at the interface and 0 at the top and bottom.
double blend_upper(Layer l, double x3, double ell, double b);
double blend_lower(Layer l, double x3, double ell, double b);

struct GeometryFields {
  GridPtr grid;
  VolumeField theta;
  VolumeField A;  // d1 theta
  VolumeField B;  // d2 theta
  VolumeField J;  // 1 + d3 theta
  VolumeField K;  // 1 / J
  /// Amat[i][j] = A_ij: identity except column 3 = (-A K, -B K, K).
  std::array<std::array<VolumeField, 3>, 3> Amat;
  /// (-d1 eta, -d2 eta, 1) on each surface.
  std::array<SurfaceField, 3> n_plus, n_minus;

  /// Physical samples used by the nonlinear terms.
  PhysField theta_p, A_p, B_p, J_p, K_p;
  /// amat_p[i][j]
  std::array<std::array<PhysField, 3>, 3> amat_p;
};

/// theta = b1 P+ eta_plus + b2 P- eta_minus; linear in the surface data.
VolumeField theta_only(const SurfaceField& eta_plus, const SurfaceField& eta_minus, const GridPtr& grid,
                       const VandermondeCoeffs& coeffs = default_vandermonde());

GeometryFields build_theta(const SurfaceField& eta_plus, const SurfaceField& eta_minus,
                           const GridPtr& grid,
                           const VandermondeCoeffs& coeffs = default_vandermonde());

struct DiffeoReport {
  double j_minus_1 = 0.0;       // sup |J - 1| over the volume
  double a_sup = 0.0;           // sup |A|
  double b_sup = 0.0;           // sup |B|
  double normal_deviation = 0.0;  // sup |N - e3| over both surfaces
  double k_minus_1_surface = 0.0; // sup |K - 1| over both surfaces
  bool pass = true;
  std::string summary() const;
};

/// Pass iff |J-1| + |A| + |B| <= 1/2 and |N - e3| + |K - 1| (on the surfaces) <= 1/2.
DiffeoReport smallness_check(const GeometryFields& fields);

}  // namespace rtwave
