#include "rtwave/nonlinear.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

namespace rtwave {

FlattenedState FlattenedState::zero(const GridPtr& grid) {
  FlattenedState s;
  s.q = VolumeField(grid);
  s.u = zero_vector(grid);
  s.eta_plus = SurfaceField(grid, Surface::plus);
  s.eta_minus = SurfaceField(grid, Surface::minus);
  return s;
}

FlattenedState& FlattenedState::operator+=(const FlattenedState& o) {
  q += o.q;
  for (int c = 0; c < 3; ++c) u[c] += o.u[c];
  eta_plus += o.eta_plus;
  eta_minus += o.eta_minus;
  return *this;
}

FlattenedState& FlattenedState::operator*=(double s) {
  q *= s;
  for (auto& c : u) c *= s;
  eta_plus *= s;
  eta_minus *= s;
  return *this;
}

double FlattenedState::max_abs_coeff() const {
  double m = q.max_abs_coeff();
  for (const auto& c : u) m = std::max(m, c.max_abs_coeff());
  for (const auto* e : {&eta_plus, &eta_minus})
    for (const auto& v : e->coeffs()) m = std::max(m, std::abs(v));
  return m;
}

FlattenedState operator-(FlattenedState a, const FlattenedState& b) {
  a.q -= b.q;
  for (int c = 0; c < 3; ++c) a.u[c] -= b.u[c];
  a.eta_plus -= b.eta_plus;
  a.eta_minus -= b.eta_minus;
  return a;
}

namespace {

using Vec3 = std::array<PhysField, 3>;
using Mat3 = std::array<std::array<PhysField, 3>, 3>;

PhysField vertical(const GridPtr& g, const std::array<std::vector<double>, 2>& v) {
  PhysField p(g);
  for (Layer l : {Layer::plus, Layer::minus}) {
    const int np = g->npoints();
    for (int i = 0; i < g->nv(l); ++i) std::fill(p.slice(l, i), p.slice(l, i) + np, v[layer_index(l)][i]);
  }
  return p;
}

Vec3 grad(const VolumeField& f) {
  return {d_dir(f, 1).physical(), d_dir(f, 2).physical(), d_dir(f, 3).physical()};
}

PhysField d3p(const PhysField& f) { return d_vertical(VolumeField::from_physical(f)).physical(); }
PhysField dkp(const PhysField& f, int k) { return d_dir(VolumeField::from_physical(f), k + 1).physical(); }

// sum_k A_ik d_k f, from precomputed derivatives
PhysField apply_A(const Mat3& a, int i, const Vec3& df) {
  PhysField out = a[i][0] * df[0];
  out += a[i][1] * df[1];
  out += a[i][2] * df[2];
  return out;
}

SurfaceField to_surface(const GridPtr& g, Surface w, const std::vector<double>& v) {
  SurfaceField s = SurfaceField::from_physical(g, w, v);
  s.dealias();
  return s;
}

struct SurfaceGeometry {
  std::vector<double> d1, d2, lap, curv_rest;  // d_i eta, Laplacian, div((w - 1) grad eta)
};

SurfaceGeometry surface_geometry(const SurfaceField& eta) {
  const GridPtr& g = eta.grid();
  SurfaceGeometry s;
  s.d1 = d_horizontal(eta, 1).physical();
  s.d2 = d_horizontal(eta, 2).physical();
  s.lap = laplacian_h(eta).physical();
  std::vector<double> f1(s.d1.size()), f2(s.d1.size());
  for (std::size_t p = 0; p < s.d1.size(); ++p) {
    const double m = s.d1[p] * s.d1[p] + s.d2[p] * s.d2[p];
    const double r = std::sqrt(1.0 + m);
    const double wm1 = -m / (r * (1.0 + r));  // (1 + m)^(-1/2) - 1
    f1[p] = wm1 * s.d1[p];
    f2[p] = wm1 * s.d2[p];
  }
  const auto c1 = d_horizontal(SurfaceField::from_physical(g, eta.which(), f1), 1);
  const auto c2 = d_horizontal(SurfaceField::from_physical(g, eta.which(), f2), 2);
  s.curv_rest = (c1 + c2).physical();
  return s;
}

}  // namespace

PhysField taylor_remainder(const PhysField& delta, const EquilibriumProfile& prof, const Background& bg) {
  using boost::math::quadrature::gauss_kronrod;
  const GridPtr& g = delta.grid();
  PhysField out(g);
  const int np = g->npoints();
  for (Layer l : {Layer::plus, Layer::minus}) {
    const auto& law = prof.law(l);
    const auto& rb = bg.rho[layer_index(l)];
    for (int i = 0; i < g->nv(l); ++i) {
      const double r0 = rb[i];
      for (int p = 0; p < np; ++p) {
        const double d = delta.at(l, i, p);
        if (d == 0.0) continue;
        if (!(r0 + d > 0.0) || !law.in_domain(r0 + d)) {
          std::ostringstream os;
          os << "total density " << r0 + d << " outside the pressure law domain";
          throw StateValidityError(os.str());
        }
        auto f = [&](double s) { return (1.0 - s) * law.d2pressure(r0 + s * d); };
        out.at(l, i, p) = d * d * gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, 5, 1e-13);
      }
    }
  }
  return out;
}

VolumeField taylor_remainder(const VolumeField& q, const VolumeField& theta, const EquilibriumProfile& prof) {
  const GridPtr& g = q.grid();
  const Background bg = sample_background(prof, *g);
  PhysField delta = q.physical() + vertical(g, bg.drho) * theta.physical();
  return VolumeField::from_physical(taylor_remainder(delta, prof, bg));
}

NonlinearTerms nonlinear_terms(const FlattenedState& st, const GeometryFields& geo, const EquilibriumProfile& prof,
                               const PhysicalParams& par, const Background& bg) {
  const GridPtr& g = st.grid();
  const double grav = prof.params().g;
  const Mat3& am = geo.amat_p;
  const PhysField& K = geo.K_p;
  // column 3 of (A - I)
  const Vec3 dm{am[0][2], am[1][2], -1.0 * ((geo.J_p - PhysField(g, 1.0)) * K)};

  const PhysField rb = vertical(g, bg.rho), rb1 = vertical(g, bg.drho);
  const PhysField q = st.q.physical();
  const PhysField delta = q + rb1 * geo.theta_p;
  const PhysField rho = rb + delta;
  for (Layer l : {Layer::plus, Layer::minus})
    for (double v : rho.layer(l))
      if (!(v > 0.0)) throw StateValidityError("total density is not positive");

  Vec3 u;
  Mat3 du;  // du[i][k] = d_k u_i
  for (int i = 0; i < 3; ++i) {
    u[i] = st.u[i].physical();
    du[i] = grad(st.u[i]);
  }

  NonlinearTerms out;

  // kinematic relation on both surfaces
  const SurfaceGeometry sp = surface_geometry(st.eta_plus), sm = surface_geometry(st.eta_minus);
  const int tp = g->nv(Layer::plus) - 1, tm = g->nv(Layer::minus) - 1;
  const int np = g->npoints();
  auto kinematic = [&](const SurfaceGeometry& s, int node, Surface w, SurfaceField& g4, SurfaceField& dte) {
    std::vector<double> a(np), b(np);
    for (int p = 0; p < np; ++p) {
      const double t = -u[0].at(Layer::plus, node, p) * s.d1[p] - u[1].at(Layer::plus, node, p) * s.d2[p];
      a[p] = t;
      b[p] = t + u[2].at(Layer::plus, node, p);
    }
    g4 = to_surface(g, w, a);
    dte = to_surface(g, w, b);
  };
  kinematic(sp, tp, Surface::plus, out.G4_plus, out.dt_eta_plus);
  kinematic(sm, 0, Surface::minus, out.G4_minus, out.dt_eta_minus);
  const PhysField theta_t = theta_only(out.dt_eta_plus, out.dt_eta_minus, g).physical();

  // continuity
  const PhysField d3delta = d3p(delta);
  PhysField G1 = rb1 * dm[2] * theta_t + K * theta_t * d3delta;
  for (int i = 0; i < 3; ++i) {
    VolumeField ru = st.u[i];
    ru.scale_vertical(bg.rho[0], bg.rho[1]);
    G1 -= dm[i] * d_vertical(ru).physical();
    const Vec3 dd = grad(VolumeField::from_physical(delta * u[i]));
    G1 -= apply_A(am, i, dd);
  }
  out.G1 = VolumeField::from_physical(G1);
  out.G1.dealias();

  // momentum
  const PhysField R = taylor_remainder(delta, prof, bg);
  out.remainder = VolumeField::from_physical(R);
  const Vec3 dR = grad(out.remainder);
  VolumeField hq = st.q;
  hq.scale_vertical(bg.hprime[0], bg.hprime[1]);
  const Vec3 dhq = grad(hq);
  VolumeField divu = d_dir(st.u[0], 1) + d_dir(st.u[1], 2) + d_dir(st.u[2], 3);
  const Vec3 ddiv = grad(divu);
  PhysField e = dm[0] * du[0][2];  // div_A u - div u
  e += dm[1] * du[1][2];
  e += dm[2] * du[2][2];
  const PhysField div_a = divu.physical() + e;
  const PhysField d3_div_a = d3p(div_a);
  const Vec3 grad_theta_a{geo.A_p * K, geo.B_p * K, (geo.J_p - PhysField(g, 1.0)) * K};

  const double mu_p = par.mu_plus, mu_m = par.mu_minus;
  const double nu_p = mu_p / 3.0 + par.bulk_plus, nu_m = mu_m / 3.0 + par.bulk_minus;
  auto per_layer = [](PhysField f, double vp, double vm) {
    for (double& x : f.layer(Layer::plus)) x *= vp;
    for (double& x : f.layer(Layer::minus)) x *= vm;
    return f;
  };
  for (int i = 0; i < 3; ++i) {
    // linear part: -rho_bar d_i(h' q) + mu Lap u_i + nu d_i div u
    VolumeField lap = d_dir(d_dir(st.u[i], 1), 1) + d_dir(d_dir(st.u[i], 2), 2) + d_vertical(d_vertical(st.u[i]));
    PhysField lin = per_layer(lap.physical(), mu_p, mu_m) + per_layer(ddiv[i], nu_p, nu_m) - rb * dhq[i];

    // nonlinear part
    PhysField Q = rho * K * theta_t * du[i][2];
    PhysField adv(g);
    for (int l = 0; l < 3; ++l) adv += u[l] * apply_A(am, l, du[i]);
    Q -= rho * adv;
    Q -= rb * dm[i] * dhq[2];
    Q -= apply_A(am, i, dR);
    Q -= grav * (delta * grad_theta_a[i]);
    // (Lap_A - Lap) u_i
    PhysField lap_rest(g);
    for (int l = 0; l < 3; ++l) {
      const PhysField gl = apply_A(am, l, du[i]);
      lap_rest += dm[l] * d3p(gl);
      lap_rest += dkp(dm[l] * du[i][2], l);
    }
    Q += per_layer(lap_rest, mu_p, mu_m);
    // grad_A div_A u - grad div u
    PhysField gd_rest = dm[i] * d3_div_a + dkp(e, i);
    Q += per_layer(gd_rest, nu_p, nu_m);

    PhysField N = lin + Q;
    PhysField dtu = N;
    for (Layer l : {Layer::plus, Layer::minus}) {
      auto& v = dtu.layer(l);
      const auto& r = rho.layer(l);
      for (std::size_t n = 0; n < v.size(); ++n) v[n] /= r[n];
    }
    out.dt_u[i] = VolumeField::from_physical(dtu);
    out.dt_u[i].dealias();
    out.G2[i] = VolumeField::from_physical(Q - delta * dtu);
    out.G2[i].dealias();
  }

  // traction defects at a boundary node: P'q (e3 - N) + (S_A - S) N + S (N - e3) - R N
  auto traction_defect = [&](Layer l, int node, const SurfaceGeometry& s) {
    const double mu = par.mu(l), lam = par.bulk(l) - 2.0 * mu / 3.0;
    const double pq = bg.dp[layer_index(l)][node];
    std::array<std::vector<double>, 3> t;
    for (auto& c : t) c.assign(np, 0.0);
    for (int p = 0; p < np; ++p) {
      double dd[3][3], dmv[3];
      for (int a = 0; a < 3; ++a) {
        dmv[a] = dm[a].at(l, node, p);
        for (int k = 0; k < 3; ++k) dd[a][k] = du[a][k].at(l, node, p);
      }
      const double ev = e.at(l, node, p);
      const double dv = dd[0][0] + dd[1][1] + dd[2][2];
      const double nd[3] = {-s.d1[p], -s.d2[p], 0.0};
      const double n[3] = {nd[0], nd[1], 1.0};
      const double qv = q.at(l, node, p), rv = R.at(l, node, p);
      for (int a = 0; a < 3; ++a) {
        double v = -pq * qv * nd[a] - rv * n[a];
        for (int b = 0; b < 3; ++b) {
          const double s_rest = mu * (dmv[a] * dd[b][2] + dmv[b] * dd[a][2]) + (a == b ? lam * ev : 0.0);
          const double s0 = mu * (dd[b][a] + dd[a][b]) + (a == b ? lam * dv : 0.0);
          v += s_rest * n[b] + s0 * nd[b];
        }
        t[a][p] = v;
      }
    }
    return t;
  };

  const auto tplus = traction_defect(Layer::plus, tp, sp);
  const auto tip = traction_defect(Layer::plus, 0, sm);
  const auto tim = traction_defect(Layer::minus, tm, sm);
  const auto eta_p = st.eta_plus.physical(), eta_m = st.eta_minus.physical();
  for (int a = 0; a < 3; ++a) {
    std::vector<double> gp(np), gm(np);
    for (int p = 0; p < np; ++p) {
      const double ndp[3] = {-sp.d1[p], -sp.d2[p], 0.0};
      const double ndm[3] = {-sm.d1[p], -sm.d2[p], 0.0};
      const double np_a = ndp[a] + (a == 2 ? 1.0 : 0.0), nm_a = ndm[a] + (a == 2 ? 1.0 : 0.0);
      gp[p] = tplus[a][p] + prof.rho1 * grav * eta_p[p] * ndp[a] -
              par.sigma_plus * (sp.lap[p] * ndp[a] + sp.curv_rest[p] * np_a);
      gm[p] = -(tip[a][p] - tim[a][p] + prof.jump * grav * eta_m[p] * ndm[a] +
                par.sigma_minus * (sm.lap[p] * ndm[a] + sm.curv_rest[p] * nm_a));
    }
    out.G3_plus[a] = to_surface(g, Surface::plus, gp);
    out.G3_minus[a] = to_surface(g, Surface::minus, gm);
  }
  return out;
}

NonlinearTerms nonlinear_terms(const FlattenedState& state, const GeometryFields& fields,
                               const EquilibriumProfile& profile, const PhysicalParams& params) {
  return nonlinear_terms(state, fields, profile, params, sample_background(profile, *state.grid()));
}

}  // namespace rtwave
