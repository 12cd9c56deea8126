#include "rtwave/fields.hpp"

#include <cmath>

namespace rtwave {

// ---------------------------------------------------------------- SurfaceField

SurfaceField::SurfaceField(GridPtr grid, Surface which)
    : grid_(std::move(grid)), which_(which), c_(grid_->nmodes(), cplx(0.0)) {}

SurfaceField SurfaceField::from_physical(GridPtr grid, Surface which,
                                         const std::vector<double>& values) {
  SurfaceField f(grid, which);
  grid->to_spectral(values.data(), f.c_.data());
  return f;
}

SurfaceField SurfaceField::from_function(GridPtr grid, Surface which,
                                         const std::function<double(double, double)>& fn) {
  const int N = grid->nh();
  std::vector<double> v(grid->npoints());
  for (int i1 = 0; i1 < N; ++i1)
    for (int i2 = 0; i2 < N; ++i2) v[i1 * N + i2] = fn(grid->x1(i1), grid->x2(i2));
  return from_physical(grid, which, v);
}

std::vector<double> SurfaceField::physical() const {
  std::vector<double> v(grid_->npoints());
  grid_->to_physical(c_.data(), v.data());
  return v;
}

double SurfaceField::hermitian_defect() const {
  double d = 0.0;
  for (int m = 0; m < grid_->nmodes(); ++m) {
    if (!grid_->retained(m)) continue;
    d = std::max(d, std::abs(c_[m] - std::conj(c_[grid_->conjugate(m)])));
  }
  return d;
}

void SurfaceField::truncate() {
  for (int m = 0; m < grid_->nmodes(); ++m)
    if (!grid_->retained(m)) c_[m] = 0.0;
}

void SurfaceField::dealias() {
  for (int m = 0; m < grid_->nmodes(); ++m)
    if (!grid_->dealiased(m)) c_[m] = 0.0;
}

SurfaceField& SurfaceField::operator+=(const SurfaceField& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}
SurfaceField& SurfaceField::operator-=(const SurfaceField& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}
SurfaceField& SurfaceField::operator*=(double s) {
  for (auto& x : c_) x *= s;
  return *this;
}
SurfaceField operator+(SurfaceField a, const SurfaceField& b) { return a += b; }
SurfaceField operator-(SurfaceField a, const SurfaceField& b) { return a -= b; }
SurfaceField operator*(double s, SurfaceField a) { return a *= s; }

// ---------------------------------------------------------------- PhysField

PhysField::PhysField(GridPtr grid, double fill) : grid_(std::move(grid)), np_(grid_->npoints()) {
  for (Layer l : {Layer::plus, Layer::minus})
    v_[layer_index(l)].assign(static_cast<size_t>(grid_->nv(l)) * np_, fill);
}

double PhysField::max_abs() const {
  double m = 0.0;
  for (const auto& v : v_)
    for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

PhysField& PhysField::operator+=(const PhysField& o) {
  for (int l = 0; l < 2; ++l)
    for (std::size_t i = 0; i < v_[l].size(); ++i) v_[l][i] += o.v_[l][i];
  return *this;
}
PhysField& PhysField::operator-=(const PhysField& o) {
  for (int l = 0; l < 2; ++l)
    for (std::size_t i = 0; i < v_[l].size(); ++i) v_[l][i] -= o.v_[l][i];
  return *this;
}
PhysField& PhysField::operator*=(const PhysField& o) {
  for (int l = 0; l < 2; ++l)
    for (std::size_t i = 0; i < v_[l].size(); ++i) v_[l][i] *= o.v_[l][i];
  return *this;
}
PhysField& PhysField::operator*=(double s) {
  for (auto& v : v_)
    for (auto& x : v) x *= s;
  return *this;
}
PhysField operator+(PhysField a, const PhysField& b) { return a += b; }
PhysField operator-(PhysField a, const PhysField& b) { return a -= b; }
PhysField operator*(PhysField a, const PhysField& b) { return a *= b; }
PhysField operator*(double s, PhysField a) { return a *= s; }

// ---------------------------------------------------------------- VolumeField

VolumeField::VolumeField(GridPtr grid) : grid_(std::move(grid)), nm_(grid_->nmodes()) {
  for (Layer l : {Layer::plus, Layer::minus})
    d_[layer_index(l)].assign(static_cast<size_t>(grid_->nv(l)) * nm_, cplx(0.0));
}

VolumeField VolumeField::from_physical(const PhysField& p) {
  VolumeField f(p.grid());
  for (Layer l : {Layer::plus, Layer::minus})
    for (int i = 0; i < f.grid_->nv(l); ++i) f.grid_->to_spectral(p.slice(l, i), f.slice(l, i));
  return f;
}

VolumeField VolumeField::from_function(
    GridPtr grid, const std::function<double(Layer, double, double, double)>& fn) {
  PhysField p(grid);
  const int N = grid->nh();
  for (Layer l : {Layer::plus, Layer::minus}) {
    const auto& z = grid->nodes(l);
    for (int i = 0; i < grid->nv(l); ++i)
      for (int i1 = 0; i1 < N; ++i1)
        for (int i2 = 0; i2 < N; ++i2) p.at(l, i, i1 * N + i2) = fn(l, grid->x1(i1), grid->x2(i2), z[i]);
  }
  return from_physical(p);
}

PhysField VolumeField::physical() const {
  PhysField p(grid_);
  for (Layer l : {Layer::plus, Layer::minus})
    for (int i = 0; i < grid_->nv(l); ++i) grid_->to_physical(slice(l, i), p.slice(l, i));
  return p;
}

double VolumeField::hermitian_defect() const {
  double d = 0.0;
  for (Layer l : {Layer::plus, Layer::minus})
    for (int i = 0; i < grid_->nv(l); ++i)
      for (int m = 0; m < nm_; ++m) {
        if (!grid_->retained(m)) continue;
        d = std::max(d, std::abs(at(l, i, m) - std::conj(at(l, i, grid_->conjugate(m)))));
      }
  return d;
}

void VolumeField::truncate() {
  for (Layer l : {Layer::plus, Layer::minus})
    for (int i = 0; i < grid_->nv(l); ++i)
      for (int m = 0; m < nm_; ++m)
        if (!grid_->retained(m)) at(l, i, m) = 0.0;
}

void VolumeField::dealias() {
  for (Layer l : {Layer::plus, Layer::minus})
    for (int i = 0; i < grid_->nv(l); ++i)
      for (int m = 0; m < nm_; ++m)
        if (!grid_->dealiased(m)) at(l, i, m) = 0.0;
}

double VolumeField::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& v : d_)
    for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

VolumeField& VolumeField::operator+=(const VolumeField& o) {
  for (int l = 0; l < 2; ++l)
    for (std::size_t i = 0; i < d_[l].size(); ++i) d_[l][i] += o.d_[l][i];
  return *this;
}
VolumeField& VolumeField::operator-=(const VolumeField& o) {
  for (int l = 0; l < 2; ++l)
    for (std::size_t i = 0; i < d_[l].size(); ++i) d_[l][i] -= o.d_[l][i];
  return *this;
}
VolumeField& VolumeField::operator*=(double s) {
  for (auto& v : d_)
    for (auto& x : v) x *= s;
  return *this;
}

VolumeField& VolumeField::scale_vertical(const std::vector<double>& plus,
                                         const std::vector<double>& minus) {
  for (Layer l : {Layer::plus, Layer::minus}) {
    const auto& s = l == Layer::plus ? plus : minus;
    for (int i = 0; i < grid_->nv(l); ++i) {
      cplx* p = slice(l, i);
      for (int m = 0; m < nm_; ++m) p[m] *= s[i];
    }
  }
  return *this;
}

VolumeField operator+(VolumeField a, const VolumeField& b) { return a += b; }
VolumeField operator-(VolumeField a, const VolumeField& b) { return a -= b; }
VolumeField operator*(double s, VolumeField a) { return a *= s; }

VectorField zero_vector(const GridPtr& grid) {
  return {VolumeField(grid), VolumeField(grid), VolumeField(grid)};
}

// ---------------------------------------------------------------- operators

namespace {
cplx multiplier(const Grid& g, int mode, int dir) {
  if (g.is_nyquist(mode)) return 0.0;
  return cplx(0.0, dir == 1 ? g.xi1(mode) : g.xi2(mode));
}
}  // namespace

VolumeField d_horizontal(const VolumeField& f, int dir) {
  if (dir != 1 && dir != 2) throw std::invalid_argument("d_horizontal: dir must be 1 or 2");
  const Grid& g = *f.grid();
  VolumeField out(f.grid());
  for (Layer l : {Layer::plus, Layer::minus})
    for (int i = 0; i < g.nv(l); ++i) {
      const cplx* a = f.slice(l, i);
      cplx* o = out.slice(l, i);
      for (int m = 0; m < g.nmodes(); ++m) o[m] = multiplier(g, m, dir) * a[m];
    }
  return out;
}

SurfaceField d_horizontal(const SurfaceField& f, int dir) {
  if (dir != 1 && dir != 2) throw std::invalid_argument("d_horizontal: dir must be 1 or 2");
  SurfaceField out(f.grid(), f.which());
  for (int m = 0; m < f.grid()->nmodes(); ++m) out[m] = multiplier(*f.grid(), m, dir) * f[m];
  return out;
}

VolumeField d_vertical(const VolumeField& f) {
  const Grid& g = *f.grid();
  VolumeField out(f.grid());
  const int M = g.nmodes();
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  for (Layer l : {Layer::plus, Layer::minus}) {
    const int n = g.nv(l);
    Eigen::Map<const RowMat> in(f.layer(l).data(), n, M);
    Eigen::Map<RowMat> res(out.layer(l).data(), n, M);
    res.noalias() = g.D(l).cast<cplx>() * in;
  }
  return out;
}

VolumeField d_dir(const VolumeField& f, int dir) {
  return dir == 3 ? d_vertical(f) : d_horizontal(f, dir);
}

SurfaceField laplacian_h(const SurfaceField& f) {
  SurfaceField out(f.grid(), f.which());
  const Grid& g = *f.grid();
  for (int m = 0; m < g.nmodes(); ++m) {
    if (g.is_nyquist(m)) continue;
    const double k = g.kabs(m);
    out[m] = -k * k * f[m];
  }
  return out;
}

double sobolev_norm_surface(const SurfaceField& f, double s) {
  if (s < -2.0 || s > 6.0) throw std::invalid_argument("sobolev_norm_surface: s outside [-2, 6]");
  const Grid& g = *f.grid();
  double sum = 0.0;
  for (int m = 0; m < g.nmodes(); ++m) {
    const double k2 = g.is_nyquist(m) ? 0.0 : g.kabs(m) * g.kabs(m);
    const double w = (s == 0.0) ? 1.0 : std::pow(1.0 + k2, s);
    sum += w * std::norm(f[m]);
  }
  return std::sqrt(sum * g.area());
}

namespace {
double layer_l2_squared(const VolumeField& f, Layer l) {
  const Grid& g = *f.grid();
  const auto& w = g.weights(l);
  double s = 0.0;
  for (int i = 0; i < g.nv(l); ++i) {
    const cplx* p = f.slice(l, i);
    double t = 0.0;
    for (int m = 0; m < g.nmodes(); ++m) t += std::norm(p[m]);
    s += w[i] * t;
  }
  return s * g.area();
}
}  // namespace

double sobolev_norm_volume(const VolumeField& f, int k) {
  if (k < 0 || k > 3) throw std::invalid_argument("sobolev_norm_volume: k must be in {0,1,2,3}");
  double sum = 0.0;
  for (int a1 = 0; a1 <= k; ++a1) {
    VolumeField f1 = f;
    for (int r = 0; r < a1; ++r) f1 = d_horizontal(f1, 1);
    for (int a2 = 0; a1 + a2 <= k; ++a2) {
      VolumeField f2 = f1;
      for (int r = 0; r < a2; ++r) f2 = d_horizontal(f2, 2);
      for (int a3 = 0; a1 + a2 + a3 <= k; ++a3) {
        VolumeField f3 = f2;
        for (int r = 0; r < a3; ++r) f3 = d_vertical(f3);
        sum += layer_l2_squared(f3, Layer::plus) + layer_l2_squared(f3, Layer::minus);
      }
    }
  }
  return std::sqrt(sum);
}

double inner_volume(const VolumeField& f, const VolumeField& h) {
  const Grid& g = *f.grid();
  double s = 0.0;
  for (Layer l : {Layer::plus, Layer::minus}) {
    const auto& w = g.weights(l);
    for (int i = 0; i < g.nv(l); ++i) {
      const cplx* a = f.slice(l, i);
      const cplx* b = h.slice(l, i);
      double t = 0.0;
      for (int m = 0; m < g.nmodes(); ++m) t += (a[m] * std::conj(b[m])).real();
      s += w[i] * t;
    }
  }
  return s * g.area();
}

double inner_surface(const SurfaceField& f, const SurfaceField& h) {
  double t = 0.0;
  for (int m = 0; m < f.grid()->nmodes(); ++m) t += (f[m] * std::conj(h[m])).real();
  return t * f.grid()->area();
}

double integrate_layer(const VolumeField& f, Layer l) {
  const Grid& g = *f.grid();
  const auto& w = g.weights(l);
  double s = 0.0;
  for (int i = 0; i < g.nv(l); ++i) s += w[i] * f.at(l, i, 0).real();
  return s * g.area();
}

double integrate_surface(const SurfaceField& f) { return f[0].real() * f.grid()->area(); }

SurfaceField trace(const VolumeField& f, TraceAt where) {
  const Grid& g = *f.grid();
  Layer l = Layer::plus;
  int node = 0;
  Surface s = Surface::minus;
  switch (where) {
    case TraceAt::top: l = Layer::plus; node = g.nv(Layer::plus) - 1; s = Surface::plus; break;
    case TraceAt::interface_plus: l = Layer::plus; node = 0; break;
    case TraceAt::interface_minus: l = Layer::minus; node = g.nv(Layer::minus) - 1; break;
    case TraceAt::bottom: l = Layer::minus; node = 0; s = Surface::bottom; break;
  }
  SurfaceField out(f.grid(), s);
  const cplx* p = f.slice(l, node);
  std::copy(p, p + g.nmodes(), out.coeffs().begin());
  return out;
}

SurfaceField jump(const VolumeField& f) {
  return trace(f, TraceAt::interface_plus) - trace(f, TraceAt::interface_minus);
}

}  // namespace rtwave
