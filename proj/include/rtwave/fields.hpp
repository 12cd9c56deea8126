#pragma once

#include <array>
#include <functional>
#include <vector>

#include "rtwave/grid.hpp"

namespace rtwave {

enum class Surface { plus, minus, bottom };

/// Horizontally periodic function on one of the flat surfaces, stored as
/// Fourier coefficients c(xi) with f(x') = sum c(xi) exp(i xi . x').
class SurfaceField {
 public:
  SurfaceField() = default;
  SurfaceField(GridPtr grid, Surface which);

  static SurfaceField from_physical(GridPtr grid, Surface which, const std::vector<double>& values);
  static SurfaceField from_function(GridPtr grid, Surface which,
                                    const std::function<double(double, double)>& f);

  const GridPtr& grid() const { return grid_; }
  Surface which() const { return which_; }
  std::vector<cplx>& coeffs() { return c_; }
  const std::vector<cplx>& coeffs() const { return c_; }
  cplx& operator[](int mode) { return c_[mode]; }
  const cplx& operator[](int mode) const { return c_[mode]; }

  std::vector<double> physical() const;
  /// Max |c(xi) - conj(c(-xi))| over retained modes.
  double hermitian_defect() const;
  /// Zero every mode outside the retained truncation.
  void truncate();
  /// Zero every mode outside the 2/3-rule band.
  void dealias();

  SurfaceField& operator+=(const SurfaceField& o);
  SurfaceField& operator-=(const SurfaceField& o);
  SurfaceField& operator*=(double s);

 private:
  GridPtr grid_;
  Surface which_ = Surface::plus;
  std::vector<cplx> c_;
};

SurfaceField operator+(SurfaceField a, const SurfaceField& b);
SurfaceField operator-(SurfaceField a, const SurfaceField& b);
SurfaceField operator*(double s, SurfaceField a);

/// Physical-space samples of a volume field: value at (layer, node, point)
/// with point = i1 * n_h + i2.
class PhysField {
 public:
  PhysField() = default;
  explicit PhysField(GridPtr grid, double fill = 0.0);
  const GridPtr& grid() const { return grid_; }
  std::vector<double>& layer(Layer l) { return v_[layer_index(l)]; }
  const std::vector<double>& layer(Layer l) const { return v_[layer_index(l)]; }
  double& at(Layer l, int node, int point) { return v_[layer_index(l)][node * np_ + point]; }
  double at(Layer l, int node, int point) const { return v_[layer_index(l)][node * np_ + point]; }
  double* slice(Layer l, int node) { return v_[layer_index(l)].data() + node * np_; }
  const double* slice(Layer l, int node) const { return v_[layer_index(l)].data() + node * np_; }
  double max_abs() const;

  PhysField& operator+=(const PhysField& o);
  PhysField& operator-=(const PhysField& o);
  PhysField& operator*=(const PhysField& o);
  PhysField& operator*=(double s);

 private:
  GridPtr grid_;
  int np_ = 0;
  std::vector<double> v_[2];
};

PhysField operator+(PhysField a, const PhysField& b);
PhysField operator-(PhysField a, const PhysField& b);
PhysField operator*(PhysField a, const PhysField& b);
PhysField operator*(double s, PhysField a);

/// Scalar volume field: Fourier coefficients in x' at each CGL node of each
/// layer. The two layers are stored separately and share the node x3 = 0.
class VolumeField {
 public:
  VolumeField() = default;
  explicit VolumeField(GridPtr grid);

  static VolumeField from_physical(const PhysField& p);
  /// f(x1, x2, x3) sampled on the grid of each layer.
  static VolumeField from_function(GridPtr grid,
                                   const std::function<double(Layer, double, double, double)>& f);
  PhysField physical() const;

  const GridPtr& grid() const { return grid_; }
  std::vector<cplx>& layer(Layer l) { return d_[layer_index(l)]; }
  const std::vector<cplx>& layer(Layer l) const { return d_[layer_index(l)]; }
  cplx& at(Layer l, int node, int mode) { return d_[layer_index(l)][node * nm_ + mode]; }
  const cplx& at(Layer l, int node, int mode) const { return d_[layer_index(l)][node * nm_ + mode]; }
  cplx* slice(Layer l, int node) { return d_[layer_index(l)].data() + node * nm_; }
  const cplx* slice(Layer l, int node) const { return d_[layer_index(l)].data() + node * nm_; }

  double hermitian_defect() const;
  void truncate();
  void dealias();
  double max_abs_coeff() const;

  VolumeField& operator+=(const VolumeField& o);
  VolumeField& operator-=(const VolumeField& o);
  VolumeField& operator*=(double s);
  /// Multiply every node by a per-layer function of x3 given at the nodes.
  VolumeField& scale_vertical(const std::vector<double>& plus, const std::vector<double>& minus);

 private:
  GridPtr grid_;
  int nm_ = 0;
  std::vector<cplx> d_[2];
};

VolumeField operator+(VolumeField a, const VolumeField& b);
VolumeField operator-(VolumeField a, const VolumeField& b);
VolumeField operator*(double s, VolumeField a);

using VectorField = std::array<VolumeField, 3>;

VectorField zero_vector(const GridPtr& grid);

/// Multiplies mode xi by i xi_dir (dir = 1 or 2). Nyquist modes map to zero.
VolumeField d_horizontal(const VolumeField& f, int dir);
SurfaceField d_horizontal(const SurfaceField& f, int dir);
/// Chebyshev collocation derivative in x3, per layer.
VolumeField d_vertical(const VolumeField& f);
/// Derivative along direction 1, 2 or 3.
VolumeField d_dir(const VolumeField& f, int dir);
SurfaceField laplacian_h(const SurfaceField& f);

/// (sum (1 + |xi|^2)^s |f^(xi)|^2)^(1/2), with f^ normalized so s = 0 is the L2 norm on the torus.
double sobolev_norm_surface(const SurfaceField& f, double s);
/// Integer-order norm summed over both layers.
double sobolev_norm_volume(const VolumeField& f, int k);
/// L2 inner product sum over both layers (real part).
double inner_volume(const VolumeField& f, const VolumeField& g);
double inner_surface(const SurfaceField& f, const SurfaceField& g);
/// Integral over one layer.
double integrate_layer(const VolumeField& f, Layer l);
double integrate_surface(const SurfaceField& f);

enum class TraceAt { top, interface_plus, interface_minus, bottom };

SurfaceField trace(const VolumeField& f, TraceAt where);
/// trace(interface_plus) - trace(interface_minus).
SurfaceField jump(const VolumeField& f);

}  // namespace rtwave
