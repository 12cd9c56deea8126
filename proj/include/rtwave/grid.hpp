#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "rtwave/common.hpp"

namespace rtwave {

struct GridSpec {
  double L1 = 1.0;
  double L2 = 1.0;
  double ell = 1.0;
  double b = 1.0;
  int n_h = 32;        // physical points per horizontal direction
  int n_v_plus = 64;   // CGL nodes in the upper layer
  int n_v_minus = 64;  // CGL nodes in the lower layer
};

/// Tensor grid of the slab: Fourier in (x1, x2) on the torus of periods
/// 2 pi L1 and 2 pi L2, Chebyshev-Gauss-Lobatto in x3 per layer.
///
/// Horizontal coefficients are stored in FFT order, index i1 * n_h + i2 with
/// wavenumber n = i for i <= n_h/2 and i - n_h otherwise. The Nyquist row and
/// column are never part of the retained truncation |n_j| < n_h/2.
class Grid {
 public:
  static std::shared_ptr<const Grid> make(const GridSpec& spec);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  const GridSpec& spec() const { return spec_; }
  double L1() const { return spec_.L1; }
  double L2() const { return spec_.L2; }
  double ell() const { return spec_.ell; }
  double b() const { return spec_.b; }
  int nh() const { return spec_.n_h; }
  int nmodes() const { return spec_.n_h * spec_.n_h; }
  int npoints() const { return nmodes(); }
  int nv(Layer l) const { return l == Layer::plus ? spec_.n_v_plus : spec_.n_v_minus; }

  int wavenumber(int i) const { return i <= nh() / 2 ? i : i - nh(); }
  int n1(int mode) const { return wavenumber(mode / nh()); }
  int n2(int mode) const { return wavenumber(mode % nh()); }
  int mode_index(int n1, int n2) const;
  int conjugate(int mode) const { return mode_index(-n1(mode), -n2(mode)); }
  double xi1(int mode) const { return n1(mode) / spec_.L1; }
  double xi2(int mode) const { return n2(mode) / spec_.L2; }
  double kabs(int mode) const;
  bool is_nyquist(int mode) const;
  /// Inside the retained truncation (excludes Nyquist).
  bool retained(int mode) const { return !is_nyquist(mode); }
  /// Inside the 2/3-rule band |n_j| <= n_h/3.
  bool dealiased(int mode) const;

  const std::vector<double>& nodes(Layer l) const { return nodes_[layer_index(l)]; }
  const Eigen::MatrixXd& D(Layer l) const { return D_[layer_index(l)]; }
  const Eigen::MatrixXd& D2(Layer l) const { return D2_[layer_index(l)]; }
  const std::vector<double>& weights(Layer l) const { return w_[layer_index(l)]; }
  /// Horizontal physical coordinates.
  double x1(int i1) const { return 2.0 * pi * spec_.L1 * i1 / nh(); }
  double x2(int i2) const { return 2.0 * pi * spec_.L2 * i2 / nh(); }
  double area() const { return 4.0 * pi * pi * spec_.L1 * spec_.L2; }
  /// Smallest vertical node spacing over both layers.
  double min_spacing() const;

  /// In-place horizontal transforms of one x3-slice of n_h^2 values.
  /// to_physical: coefficients -> values (real part returned).
  void to_physical(const cplx* coeffs, double* values) const;
  void to_spectral(const double* values, cplx* coeffs) const;

 private:
  explicit Grid(const GridSpec& spec);
  GridSpec spec_;
  std::vector<double> nodes_[2];
  Eigen::MatrixXd D_[2], D2_[2];
  std::vector<double> w_[2];
  void* plan_fwd_ = nullptr;
  void* plan_bwd_ = nullptr;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace rtwave
