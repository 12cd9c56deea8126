#include "rtwave/timestep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rtwave {

const char* scheme_name(Scheme s) { return s == Scheme::imex1 ? "imex1" : "imex2"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "imex1") return Scheme::imex1;
  if (name == "imex2") return Scheme::imex2;
  throw ConfigError("scheme: expected imex1 or imex2, got '" + name + "'");
}

Stepper::Stepper(const EquilibriumProfile& profile, const PhysicalParams& params, GridPtr grid,
                 const StepperOptions& opt)
    : profile_(profile), params_(params), grid_(std::move(grid)), opt_(opt) {
  if (!(opt_.dt > 0.0)) throw ConfigError("simulate.dt: must be positive");
  if (opt_.startup_steps < 0) throw ConfigError("simulate.startup_steps: must be nonnegative");
  const double mu_max = std::max(params_.mu_plus, params_.mu_minus);
  const double h = grid_->min_spacing();
  if (opt_.dt > opt_.cfl * h * h / mu_max) {
    std::ostringstream os;
    os << "simulate.dt: " << opt_.dt << " exceeds cfl * h^2 / mu = " << opt_.cfl * h * h / mu_max;
    throw ConfigError(os.str());
  }
  bg_ = sample_background(profile_, *grid_);
  const double theta = opt_.scheme == Scheme::imex1 ? 1.0 : 0.5;
  for (int m = 0; m < grid_->nmodes(); ++m) {
    if (!grid_->dealiased(m)) continue;
    const int n1 = grid_->n1(m), n2 = grid_->n2(m);
    if (n1 < 0 || (n1 == 0 && n2 < 0)) continue;
    ModeData d;
    d.mode = m;
    d.mirror = grid_->conjugate(m);
    d.op = assemble_mode_operator({grid_->xi1(m), grid_->xi2(m)}, bg_, profile_, params_, *grid_, false);
    d.lu.compute(d.op.B_mat - theta * opt_.dt * d.op.A_mat);
    modes_.push_back(std::move(d));
  }
}

Eigen::VectorXcd Stepper::pack(const FlattenedState& s, int m) const {
  ModeLayout L;
  L.np = grid_->nv(Layer::plus);
  L.nm = grid_->nv(Layer::minus);
  Eigen::VectorXcd x(L.size());
  for (Layer l : {Layer::plus, Layer::minus})
    for (int i = 0; i < L.n(l); ++i) {
      x(L.q(l, i)) = s.q.at(l, i, m);
      for (int c = 0; c < 3; ++c) x(L.u(l, c, i)) = s.u[c].at(l, i, m);
    }
  x(L.eta(Layer::plus)) = s.eta_plus[m];
  x(L.eta(Layer::minus)) = s.eta_minus[m];
  return x;
}

void Stepper::unpack(const Eigen::VectorXcd& x, int m, FlattenedState& s) const {
  ModeLayout L;
  L.np = grid_->nv(Layer::plus);
  L.nm = grid_->nv(Layer::minus);
  for (Layer l : {Layer::plus, Layer::minus})
    for (int i = 0; i < L.n(l); ++i) {
      s.q.at(l, i, m) = x(L.q(l, i));
      for (int c = 0; c < 3; ++c) s.u[c].at(l, i, m) = x(L.u(l, c, i));
    }
  s.eta_plus[m] = x(L.eta(Layer::plus));
  s.eta_minus[m] = x(L.eta(Layer::minus));
}

Eigen::VectorXcd Stepper::forcing(const NonlinearTerms& G, int m) const {
  ModeLayout L;
  L.np = grid_->nv(Layer::plus);
  L.nm = grid_->nv(Layer::minus);
  Eigen::VectorXcd f = Eigen::VectorXcd::Zero(L.size());
  for (Layer l : {Layer::plus, Layer::minus}) {
    const int n = L.n(l);
    for (int i = 0; i < n; ++i) f(L.q(l, i)) = G.G1.at(l, i, m);
    for (int c = 0; c < 3; ++c)
      for (int i = 1; i < n - 1; ++i) f(L.u(l, c, i)) = G.G2[c].at(l, i, m);
  }
  for (int c = 0; c < 3; ++c) {
    f(L.u(Layer::plus, c, L.np - 1)) = -G.G3_plus[c][m];
    f(L.u(Layer::minus, c, L.nm - 1)) = G.G3_minus[c][m];
  }
  f(L.eta(Layer::plus)) = G.G4_plus[m];
  f(L.eta(Layer::minus)) = G.G4_minus[m];
  return f;
}

NonlinearTerms Stepper::forcing_terms(const FlattenedState& s) const {
  const GeometryFields geo = build_theta(s.eta_plus, s.eta_minus, grid_);
  const DiffeoReport rep = smallness_check(geo);
  if (!rep.pass)
    throw GeometryBreakdownError("flattening map left the small-data regime at t = " + std::to_string(s.time) +
                                 " (" + rep.summary() + "); reduce the initial amplitude");
  return nonlinear_terms(s, geo, profile_, params_, bg_);
}

FlattenedState Stepper::half_euler(const FlattenedState& s0) const {
  const double dt = 0.5 * opt_.dt;
  const NonlinearTerms G0 = forcing_terms(s0);
  FlattenedState out = FlattenedState::zero(grid_);
  out.time = s0.time + dt;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    const ModeData& d = modes_[k];
    const Eigen::VectorXcd x0 = pack(s0, d.mode);
    const Eigen::VectorXcd x1 = d.lu.solve(d.op.B_mat * x0 + dt * forcing(G0, d.mode));
    unpack(x1, d.mode, out);
    if (d.mirror != d.mode) unpack(x1.conjugate(), d.mirror, out);
  }
  return out;
}

FlattenedState Stepper::step(const FlattenedState& s0, bool damped) const {
  const double dt = opt_.dt;
  FlattenedState out = FlattenedState::zero(grid_);
  out.time = s0.time + dt;

  if (opt_.scheme == Scheme::imex2 && damped) {
    out = half_euler(half_euler(s0));
    out.time = s0.time + dt;
  } else if (opt_.scheme == Scheme::imex1) {
    const NonlinearTerms G0 = forcing_terms(s0);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < modes_.size(); ++k) {
      const ModeData& d = modes_[k];
      const Eigen::VectorXcd x0 = pack(s0, d.mode);
      const Eigen::VectorXcd rhs = d.op.B_mat * x0 + dt * forcing(G0, d.mode);
      const Eigen::VectorXcd x1 = d.lu.solve(rhs);
      unpack(x1, d.mode, out);
      if (d.mirror != d.mode) unpack(x1.conjugate(), d.mirror, out);
    }
  } else {
    // half step with the shared matrix B - dt/2 A, then trapezoid with midpoint forcing
    const NonlinearTerms G0 = forcing_terms(s0);
    FlattenedState half = FlattenedState::zero(grid_);
    half.time = s0.time + 0.5 * dt;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < modes_.size(); ++k) {
      const ModeData& d = modes_[k];
      const Eigen::VectorXcd x0 = pack(s0, d.mode);
      const Eigen::VectorXcd rhs = d.op.B_mat * x0 + 0.5 * dt * forcing(G0, d.mode);
      const Eigen::VectorXcd xh = d.lu.solve(rhs);
      unpack(xh, d.mode, half);
      if (d.mirror != d.mode) unpack(xh.conjugate(), d.mirror, half);
    }
    const NonlinearTerms Gh = forcing_terms(half);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < modes_.size(); ++k) {
      const ModeData& d = modes_[k];
      const Eigen::VectorXcd x0 = pack(s0, d.mode);
      const Eigen::VectorXcd f0 = forcing(G0, d.mode), fh = forcing(Gh, d.mode);
      Eigen::VectorXcd rhs = d.op.B_mat * x0 + 0.5 * dt * (d.op.A_mat * x0) + dt * fh;
      for (int r = 0; r < rhs.size(); ++r)
        if (d.op.rows[r].algebraic()) rhs(r) = 0.5 * dt * (2.0 * fh(r) - f0(r));
      const Eigen::VectorXcd x1 = d.lu.solve(rhs);
      unpack(x1, d.mode, out);
      if (d.mirror != d.mode) unpack(x1.conjugate(), d.mirror, out);
    }
  }
  if (!std::isfinite(out.max_abs_coeff())) throw NumericalError("implicit solve produced non-finite values");
  const GeometryFields geo = build_theta(out.eta_plus, out.eta_minus, grid_);
  const DiffeoReport rep = smallness_check(geo);
  if (!rep.pass)
    throw GeometryBreakdownError("flattening map left the small-data regime at t = " + std::to_string(out.time) +
                                 " (" + rep.summary() + "); reduce the initial amplitude");
  return out;
}

namespace {

double layer_integral(const PhysField& f, Layer l) {
  const GridPtr& g = f.grid();
  const auto& w = g->weights(l);
  const int np = g->npoints();
  double s = 0.0;
  for (int i = 0; i < g->nv(l); ++i) {
    double row = 0.0;
    for (int p = 0; p < np; ++p) row += f.at(l, i, p);
    s += w[i] * row;
  }
  return s * g->area() / np;
}

}  // namespace

FlattenedState advance(const Stepper& stepper, FlattenedState s, int steps,
                       const std::function<void(const FlattenedState&, int)>& observer) {
  const int startup = stepper.options().startup_steps;
  for (int k = 0; k < steps; ++k) {
    s = stepper.step(s, k < startup);
    if (observer) observer(s, k + 1);
  }
  return s;
}

double layer_mass(const FlattenedState& s, const GeometryFields& geo, const Background& bg, Layer l) {
  const GridPtr& g = s.grid();
  const PhysField q = s.q.physical();
  const int li = layer_index(l);
  PhysField f(g);
  const int np = g->npoints();
  for (int i = 0; i < g->nv(l); ++i)
    for (int p = 0; p < np; ++p) {
      const double delta = q.at(l, i, p) + bg.drho[li][i] * geo.theta_p.at(l, i, p);
      const double jm1 = geo.J_p.at(l, i, p) - 1.0;
      // rho J - rho_bar, then rho_bar added back after the sum
      f.at(l, i, p) = delta + (bg.rho[li][i] + delta) * jm1;
    }
  double base = 0.0;
  const auto& w = g->weights(l);
  for (int i = 0; i < g->nv(l); ++i) base += w[i] * bg.rho[li][i];
  return base * g->area() + layer_integral(f, l);
}

FlattenedState project_initial(FlattenedState s, const EquilibriumProfile& prof) {
  const GridPtr& g = s.grid();
  const int np_ = g->nv(Layer::plus), nm = g->nv(Layer::minus);
  const double ell = g->ell(), b = g->b();
  const auto& zp = g->nodes(Layer::plus);
  const auto& zm = g->nodes(Layer::minus);
  for (auto& c : s.u) {
    // bottom: subtract u(-b) times a ramp equal to 1 at -b and 0 at the interface
    std::vector<cplx> bottom(c.slice(Layer::minus, 0), c.slice(Layer::minus, 0) + g->nmodes());
    for (int i = 0; i < nm; ++i) {
      const double r = -zm[i] / b;
      for (int m = 0; m < g->nmodes(); ++m) c.at(Layer::minus, i, m) -= r * bottom[m];
    }
    // interface: split the jump between the layers with ramps vanishing at the top and bottom
    for (int m = 0; m < g->nmodes(); ++m) {
      const cplx j = c.at(Layer::plus, 0, m) - c.at(Layer::minus, nm - 1, m);
      if (j == cplx(0.0)) continue;
      for (int i = 0; i < np_; ++i) c.at(Layer::plus, i, m) -= 0.5 * j * (1.0 - zp[i] / ell);
      for (int i = 0; i < nm; ++i) c.at(Layer::minus, i, m) += 0.5 * j * (zm[i] + b) / b;
    }
    c.dealias();
  }
  s.q.dealias();
  s.eta_plus.dealias();
  s.eta_minus.dealias();

  const Background bg = sample_background(prof, *g);
  const GeometryFields geo = build_theta(s.eta_plus, s.eta_minus, g);
  for (Layer l : {Layer::plus, Layer::minus}) {
    const int li = layer_index(l);
    double target = 0.0, jint = 0.0;
    const auto& w = g->weights(l);
    for (int i = 0; i < g->nv(l); ++i) target += w[i] * bg.rho[li][i];
    target *= g->area();
    for (int i = 0; i < g->nv(l); ++i) jint += w[i] * geo.J.at(l, i, 0).real();
    jint *= g->area();
    const double c = (target - layer_mass(s, geo, bg, l)) / jint;
    for (int i = 0; i < g->nv(l); ++i) s.q.at(l, i, 0) += c;
  }
  return s;
}

}  // namespace rtwave
