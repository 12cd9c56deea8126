#pragma once

#include <array>
#include <vector>

#include "rtwave/equilibrium.hpp"
#include "rtwave/grid.hpp"

namespace rtwave {

/// Equilibrium coefficients sampled at the vertical nodes of a grid.
struct Background {
  std::array<std::vector<double>, 2> rho;     // rho-bar
  std::array<std::vector<double>, 2> drho;    // d3 rho-bar
  std::array<std::vector<double>, 2> d2rho;   // d3^2 rho-bar
  std::array<std::vector<double>, 2> dp;      // P'(rho-bar)
  std::array<std::vector<double>, 2> d2p;     // P''(rho-bar)
  std::array<std::vector<double>, 2> hprime;  // P'(rho-bar) / rho-bar

  const std::vector<double>& operator()(const std::array<std::vector<double>, 2>& a, Layer l) const {
    return a[layer_index(l)];
  }
};

Background sample_background(const EquilibriumProfile& profile, const Grid& grid);

}  // namespace rtwave
