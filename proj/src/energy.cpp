#include "rtwave/energy.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "rtwave/quadrature.hpp"

namespace rtwave {

namespace {

using Vec3 = std::array<PhysField, 3>;

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

double surface_integral(const std::vector<double>& v, const Grid& g) {
  double s = 0.0;
  for (double x : v) s += x;
  return s * g.area() / static_cast<double>(v.size());
}

// Reference density of R in each layer: the equilibrium density at the layer top.
double reference_density(const EquilibriumProfile& prof, Layer l) {
  return l == Layer::plus ? prof.rho1 : prof.rho_bot_of_interface;
}

// R(z) = z int_c^z P(s)/s^2 ds and R'(z) = int_c^z P(s)/s^2 ds + P(z)/z at the nodes.
struct InternalEnergyTable {
  std::array<std::vector<double>, 2> R, dR;
};

InternalEnergyTable internal_energy_table(const EquilibriumProfile& prof, const Background& bg) {
  InternalEnergyTable t;
  for (Layer l : {Layer::plus, Layer::minus}) {
    const auto& law = prof.law(l);
    const double c = reference_density(prof, l);
    const auto& rb = bg.rho[layer_index(l)];
    auto& R = t.R[layer_index(l)];
    auto& dR = t.dR[layer_index(l)];
    R.resize(rb.size());
    dR.resize(rb.size());
    for (std::size_t i = 0; i < rb.size(); ++i) {
      const double z = rb[i];
      const double I = integrate([&](double s) { return law.pressure(s) / (s * s); }, c, z);
      R[i] = z * I;
      dR[i] = I + law.pressure(z) / z;
    }
  }
  return t;
}

// delta^2 int_0^1 (1 - s) R''(rho_bar + s delta) ds with R''(z) = P'(z) / z.
double internal_remainder(const PressureLaw& law, double r0, double d) {
  using boost::math::quadrature::gauss_kronrod;
  if (d == 0.0) return 0.0;
  auto f = [&](double s) {
    const double z = r0 + s * d;
    return (1.0 - s) * law.dpressure(z) / z;
  };
  return d * d * gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, 5, 1e-13);
}

void check_density(const PressureLaw& law, double rho) {
  if (!(rho > 0.0) || !law.in_domain(rho)) {
    std::ostringstream os;
    os << "total density " << rho << " outside the pressure law domain";
    throw StateValidityError(os.str());
  }
}

double curvature_energy(const SurfaceField& eta) {
  const Grid& g = *eta.grid();
  const auto e1 = d_horizontal(eta, 1).physical();
  const auto e2 = d_horizontal(eta, 2).physical();
  std::vector<double> v(e1.size());
  for (std::size_t p = 0; p < v.size(); ++p) {
    const double s = e1[p] * e1[p] + e2[p] * e2[p];
    v[p] = s / (std::sqrt(1.0 + s) + 1.0);
  }
  return surface_integral(v, g);
}

double physical_energy_impl(const FlattenedState& st, const GeometryFields& geo, const EquilibriumProfile& prof,
                            const PhysicalParams& par, const Background& bg, const InternalEnergyTable& tab) {
  const GridPtr& g = st.grid();
  const double grav = par.g;
  const PhysField q = st.q.physical();
  const Vec3 u{st.u[0].physical(), st.u[1].physical(), st.u[2].physical()};
  const int np = g->npoints();
  double total = 0.0;
  for (Layer l : {Layer::plus, Layer::minus}) {
    const int li = layer_index(l);
    const auto& law = prof.law(l);
    const auto& x3 = g->nodes(l);
    PhysField f(g);
    for (int i = 0; i < g->nv(l); ++i) {
      const double rb = bg.rho[li][i];
      for (int p = 0; p < np; ++p) {
        const double th = geo.theta_p.at(l, i, p);
        const double J = geo.J_p.at(l, i, p);
        const double d = q.at(l, i, p) + bg.drho[li][i] * th;
        const double rho = rb + d;
        check_density(law, rho);
        const double u2 = u[0].at(l, i, p) * u[0].at(l, i, p) + u[1].at(l, i, p) * u[1].at(l, i, p) +
                          u[2].at(l, i, p) * u[2].at(l, i, p);
        const double dR = tab.dR[li][i] * d + internal_remainder(law, rb, d);
        const double R = tab.R[li][i] + dR;
        const double kin = 0.5 * rho * J * u2;
        const double internal = dR + R * (J - 1.0);
        const double pot = grav * ((d + rho * (J - 1.0)) * x3[i] + rho * th * J);
        f.at(l, i, p) = kin + internal + pot;
      }
    }
    total += layer_integral(f, l);
  }
  total += par.p_atm * st.eta_plus[0].real() * g->area();
  total += par.sigma_plus * curvature_energy(st.eta_plus);
  total += par.sigma_minus * curvature_energy(st.eta_minus);
  return total;
}

// Tier weights of the eta terms.
struct TierWeights {
  double hp = 0.0, hm = 0.0;  // Heaviside of +jump and -jump
  double wE = 0.0, wD = 0.0, sigma = 0.0;
};

TierWeights tier_weights(const EquilibriumProfile& prof, const PhysicalParams& par) {
  TierWeights w;
  w.hp = prof.jump > 0.0 ? 1.0 : 0.0;
  w.hm = prof.jump < 0.0 ? 1.0 : 0.0;
  const double sp = par.sigma_plus, sm = par.sigma_minus - prof.sigma_c;
  w.wE = std::min({1.0, sp, sm});
  w.wD = std::min({1.0, sp, sm, sp * sp, sm * sm});
  w.sigma = std::min(par.sigma_plus, par.sigma_minus);
  return w;
}

double vol2(const VolumeField& f, int k) {
  const double n = sobolev_norm_volume(f, std::clamp(k, 0, 3));
  return n * n;
}

double vec2(const VectorField& u, int k) { return vol2(u[0], k) + vol2(u[1], k) + vol2(u[2], k); }

double surf2(const FlattenedState& s, double order) {
  const double a = sobolev_norm_surface(s.eta_plus, order), b = sobolev_norm_surface(s.eta_minus, order);
  return a * a + b * b;
}

double max_eta(const FlattenedState& s) {
  double m = 0.0;
  for (const SurfaceField* e : {&s.eta_plus, &s.eta_minus})
    for (double v : e->physical()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

std::string energy_report_note(int tier) {
  std::ostringstream os;
  os << "tier " << tier << " surrogate of the energy and dissipation functionals: derivative counts 2n with n = "
     << tier << ", negative volume orders clamped to 0, time derivatives from backward difference quotients";
  return os.str();
}

double physical_energy(const FlattenedState& s, const GeometryFields& geo, const EquilibriumProfile& profile,
                       const PhysicalParams& params, const Background& bg) {
  return physical_energy_impl(s, geo, profile, params, bg, internal_energy_table(profile, bg));
}

double physical_dissipation(const FlattenedState& st, const GeometryFields& geo, const PhysicalParams& par) {
  const GridPtr& g = st.grid();
  // gu[i][j] = (grad_A u)_ij = A_jk d_k u_i
  std::array<Vec3, 3> du;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) du[i][k] = d_dir(st.u[i], k + 1).physical();
  std::array<Vec3, 3> gu;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      gu[i][j] = geo.amat_p[j][0] * du[i][0];
      gu[i][j] += geo.amat_p[j][1] * du[i][1];
      gu[i][j] += geo.amat_p[j][2] * du[i][2];
    }
  const int np = g->npoints();
  double total = 0.0;
  for (Layer l : {Layer::plus, Layer::minus}) {
    const double mu = par.mu(l), bulk = par.bulk(l);
    PhysField f(g);
    for (int n = 0; n < g->nv(l); ++n)
      for (int p = 0; p < np; ++p) {
        const double div = gu[0][0].at(l, n, p) + gu[1][1].at(l, n, p) + gu[2][2].at(l, n, p);
        double s2 = 0.0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            double e = gu[i][j].at(l, n, p) + gu[j][i].at(l, n, p);
            if (i == j) e -= 2.0 * div / 3.0;
            s2 += e * e;
          }
        f.at(l, n, p) = geo.J_p.at(l, n, p) * (0.5 * mu * s2 + bulk * div * div);
      }
    total += layer_integral(f, l);
  }
  return total;
}

EnergyMonitor::EnergyMonitor(const EquilibriumProfile& profile, const PhysicalParams& params, GridPtr grid,
                             int tier, double dt)
    : profile_(profile), params_(params), grid_(std::move(grid)), tier_(tier), dt_(dt) {
  if (tier != 0 && tier != 1) throw ConfigError("energy.tier: only tiers 0 and 1 are implemented");
  if (!(dt > 0.0)) throw ConfigError("energy.dt: must be positive");
  bg_ = sample_background(profile_, *grid_);
  const auto tab = internal_energy_table(profile_, bg_);
  R_ = tab.R;
  dR_ = tab.dR;
}

EnergyReport EnergyMonitor::push(const FlattenedState& s) {
  history_.push_back(s);
  if (history_.size() > 3) history_.pop_front();
  const GeometryFields geo = build_theta(s.eta_plus, s.eta_minus, grid_);

  EnergyReport r;
  r.tier = tier_;
  r.time = s.time;
  InternalEnergyTable tab{R_, dR_};
  r.physical_energy = physical_energy_impl(s, geo, profile_, params_, bg_, tab);
  r.physical_dissipation = physical_dissipation(s, geo, params_);
  r.mass_plus = layer_mass(s, geo, bg_, Layer::plus);
  r.mass_minus = layer_mass(s, geo, bg_, Layer::minus);
  r.max_eta_amplitude = max_eta(s);

  energies_.push_back(r.physical_energy);
  dissipations_.push_back(r.physical_dissipation);
  if (energies_.size() > 3) {
    energies_.pop_front();
    dissipations_.pop_front();
  }
  if (energies_.size() == 3) r.energy_law_residual = (energies_[2] - energies_[0]) / (2.0 * dt_) + dissipations_[1];

  // time derivatives from backward differences; zero while the history is too short
  const std::size_t h = history_.size();
  FlattenedState d1 = FlattenedState::zero(grid_), d2 = FlattenedState::zero(grid_);
  if (h >= 2) {
    d1 = history_[h - 1] - history_[h - 2];
    d1 *= 1.0 / dt_;
  }
  if (h >= 3) {
    d2 = (history_[h - 1] - history_[h - 2]) - (history_[h - 2] - history_[h - 3]);
    d2 *= 1.0 / (dt_ * dt_);
  }

  const TierWeights w = tier_weights(profile_, params_);
  const int n = tier_;
  const double sig2 = w.sigma * w.sigma;
  double E = vec2(s.u, 2 * n) + vol2(s.q, 2 * n);
  double D = vec2(s.u, 2 * n + 1) + vol2(s.q, 2 * n) + vol2(d1.q, 2 * n - 1);
  if (n == 1) {
    E += vec2(d1.u, 0) + vol2(d1.q, 1) + surf2(d1, 1.5);
    D += vec2(d1.u, 1) + vol2(d2.q, 0) + surf2(d2, 0.5);
  }
  E += w.hp * w.wE * surf2(s, 2 * n + 1) + w.hm * (surf2(s, 2 * n) + std::min(1.0, w.sigma) * surf2(s, 2 * n + 1));
  D += w.hp * w.wD * surf2(s, 2 * n + 1.5) +
       w.hm * (surf2(s, 2 * n - 0.5) + std::min(1.0, sig2) * surf2(s, 2 * n + 1.5));
  D += surf2(d1, 2 * n - 0.5) + sig2 * surf2(d1, 2 * n + 0.5);
  r.E_n_sigma = E;
  r.D_n_sigma = D;
  r.F_surrogate = surf2(s, 2 * n + 0.5);
  return r;
}

EnergyReport energy_functionals(const std::vector<FlattenedState>& history, double dt,
                                const EquilibriumProfile& profile, const PhysicalParams& params, int tier) {
  if (history.empty()) throw DataError("energy_functionals: empty history");
  EnergyMonitor m(profile, params, history.back().grid(), tier, dt);
  const std::size_t start = history.size() > 3 ? history.size() - 3 : 0;
  EnergyReport r;
  for (std::size_t i = start; i < history.size(); ++i) r = m.push(history[i]);
  return r;
}

}  // namespace rtwave
