#pragma once

#include <array>
#include <cstdint>

#include "rtwave/grid.hpp"

namespace rtwave {

struct KornReport {
  /// Minimum of |D0 u|_0^2 / |u|_1^2 over the discrete space.
  double minimum = 0.0;
  /// Horizontal mode (n1, n2) attaining the minimum.
  int n1 = 0, n2 = 0;
  bool bottom_dirichlet = true;
};

/// Discrete layered Korn constant: velocity fields with matching values at the
/// interface node (and zero at the bottom unless bottom_dirichlet is false),
/// minimised over every horizontal mode of the 2/3 band with one generalized
/// Hermitian eigenproblem per mode. D0 u = grad u + grad u^T - (2/3) div u I.
KornReport korn_constant_estimate(const GridPtr& grid, bool bottom_dirichlet = true);

struct KernelReport {
  int samples = 0;
  /// Largest |D0 u| over the box nodes and all samples.
  double max_residual = 0.0;
  /// Rank of the map (a, A, gamma, b) -> u restricted to the bottom plane.
  int rank = 0;
  int unknowns = 10;
  bool unique_zero_solution() const { return rank == unknowns; }
};

/// Applies the collocation D0 on a Chebyshev tensor grid spanning the slab to
/// random fields u = a + A x + gamma x + (b.x) x - b |x|^2 / 2, A antisymmetric.
KernelReport deviatoric_kernel_check(const GridPtr& grid, int samples = 20, std::uint64_t seed = 1);

struct PoissonBoundReport {
  int trials = 0;
  /// Worst |grad^q P f|_0 / |f|_{q-1/2} for q = 0, 1, 2 over both extensions below their surfaces.
  std::array<double, 3> worst{};
  /// Reference constants 1, 1, sqrt(2) of the zero-mean exponential extension.
  std::array<double, 3> bound{};
  bool pass() const;
};

/// Random zero-mean surface fields with modes |n_j| <= 4, extended by the
/// upper extension into the upper layer and by the lower extension into the lower layer.
PoissonBoundReport poisson_bound_ratios(const GridPtr& grid, int trials = 100, std::uint64_t seed = 9);

}  // namespace rtwave
