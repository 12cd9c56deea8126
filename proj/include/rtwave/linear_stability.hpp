#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rtwave/background.hpp"
#include "rtwave/equilibrium.hpp"
#include "rtwave/fields.hpp"

namespace rtwave {

/// Unknown ordering of one horizontal mode:
/// q+ (n+), q- (n-), u+ components 1..3 (n+ each), u- components 1..3
/// (n- each), eta+, eta-. Nodes ascend in x3 within each layer.
struct ModeLayout {
  int np = 0;
  int nm = 0;
  int size() const { return 4 * (np + nm) + 2; }
  int n(Layer l) const { return l == Layer::plus ? np : nm; }
  int q(Layer l, int node) const { return l == Layer::plus ? node : np + node; }
  /// comp in {0, 1, 2}
  int u(Layer l, int comp, int node) const {
    return l == Layer::plus ? np + nm + comp * np + node : np + nm + 3 * np + comp * nm + node;
  }
  int eta(Layer l) const { return 4 * (np + nm) + (l == Layer::plus ? 0 : 1); }
};

enum class RowKind {
  continuity,
  momentum,
  kinematic,
  stress_top,
  velocity_jump,
  stress_jump,
  no_slip,
};

const char* row_kind_name(RowKind k);

struct RowInfo {
  RowKind kind;
  Layer layer;
  int component;  // 0..2 for vector rows, -1 otherwise
  int node;
  bool algebraic() const {
    return kind == RowKind::stress_top || kind == RowKind::velocity_jump ||
           kind == RowKind::stress_jump || kind == RowKind::no_slip;
  }
};

/// Pencil lambda B x = A x of the linearized perturbation system at one
/// horizontal wavenumber. Boundary, jump and Dirichlet equations replace the
/// momentum rows at the endpoint nodes of each layer, and carry zero rows in B.
struct ModeOperator {
  std::array<double, 2> xi{0.0, 0.0};
  ModeLayout layout;
  Eigen::MatrixXcd A_mat;
  Eigen::MatrixXcd B_mat;
  std::vector<RowInfo> rows;
  /// Real pencil obtained by rotating xi onto (|xi|, 0) and substituting
  /// u1 = i v1; same spectrum as (A_mat, B_mat).
  std::optional<Eigen::MatrixXd> A_real, B_real;
};

ModeOperator assemble_mode_operator(const std::array<double, 2>& xi, const EquilibriumProfile& profile,
                                    const PhysicalParams& params, const Grid& grid);

/// Same, with precomputed node coefficients.
ModeOperator assemble_mode_operator(const std::array<double, 2>& xi, const Background& bg,
                                    const EquilibriumProfile& profile, const PhysicalParams& params,
                                    const Grid& grid, bool with_real_form = true);

struct GrowthRateResult {
  std::array<double, 2> xi{0.0, 0.0};
  cplx lambda_max{0.0, 0.0};
  std::vector<cplx> spectrum;   // retained finite eigenvalues, sorted by descending real part
  std::vector<cplx> marginal;   // zero eigenvalues of the mean mode
  int n_filtered = 0;           // infinite or spurious eigenvalues removed
  bool stable = true;
};

struct GrowthRateOptions {
  double cutoff = 1e8;          // |lambda| above this is treated as spurious
  double stable_tol = 1e-8;
  double marginal_tol = 1e-7;   // only applied at xi = 0
};

GrowthRateResult growth_rate(const ModeOperator& op, const GrowthRateOptions& opt = {});

/// Growth rate at xi computed at the grid's resolution and at n_v + 8, keeping
/// only eigenvalues present in both spectra (relative agreement rel_tol).
GrowthRateResult growth_rate_verified(const std::array<double, 2>& xi, const EquilibriumProfile& profile,
                                      const PhysicalParams& params, const Grid& grid,
                                      double rel_tol = 1e-3, const GrowthRateOptions& opt = {});

/// Right eigenvector of the pencil for an eigenvalue estimate (inverse iteration).
Eigen::VectorXcd mode_eigenvector(const ModeOperator& op, cplx lambda);

struct NeutralSigmaResult {
  double sigma_star = 0.0;
  double sigma_c = 0.0;
  double per_mode_prediction = 0.0;  // jump * g / |xi|^2
  int evaluations = 0;
};

/// Bisection on sigma_minus in [bracket[0], bracket[1]] for the sign change
/// of Re lambda_max at xi. Throws BracketError when there is no sign change.
NeutralSigmaResult find_neutral_sigma(const EquilibriumProfile& profile, const PhysicalParams& params,
                                      const Grid& grid, const std::array<double, 2>& xi,
                                      const std::array<double, 2>& bracket);

/// min |grad zeta|^2 / |zeta|^2 over zero-mean band-limited zeta.
double sharp_poincare_constant(const Grid& grid);

/// |grad zeta|_0^2 / |zeta|_0^2; throws DataError for a nonzero mean.
double poincare_ratio(const SurfaceField& zeta);

struct PositivityReport {
  double min_quotient = 0.0;
  bool positive = false;
  std::array<int, 2> argmin_mode{0, 0};
};

/// Minimum Rayleigh quotient of the linearized energy form against
/// |q|_0^2 + |eta+|_0^2 + |eta-|_0^2 over the retained modes.
PositivityReport energy_form_positivity(const EquilibriumProfile& profile, const PhysicalParams& params,
                                        const Grid& grid, bool with_mass_constraints);

}  // namespace rtwave
