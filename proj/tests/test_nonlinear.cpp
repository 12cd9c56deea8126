#include <gtest/gtest.h>

#include <cmath>
#include <optional>

#include "rtwave/nonlinear.hpp"

using namespace rtwave;

namespace {

struct Setup {
  PhysicalParams p;
  GridPtr g;
  std::optional<EquilibriumProfile> prof;
};

// Both laws quadratic (P'' constant), so the remainder is K delta^2 in closed form.
Setup make_setup(int nh = 24, int nv = 20) {
  Setup s;
  s.p.g = 1.0;
  s.p.p_atm = 1.0;
  s.p.mu_plus = 0.7;
  s.p.mu_minus = 1.3;
  s.p.bulk_plus = 0.2;
  s.p.bulk_minus = 0.4;
  s.p.sigma_plus = 0.3;
  s.p.sigma_minus = 0.6;
  GridSpec gs;
  gs.n_h = nh;
  gs.n_v_plus = nv;
  gs.n_v_minus = nv;
  s.g = Grid::make(gs);
  s.prof.emplace(build_equilibrium(PressureLaw::polytropic(1, 2), PressureLaw::polytropic(9, 2), s.p, 32));
  return s;
}

FlattenedState smooth_state(const GridPtr& g, double eps) {
  FlattenedState st = FlattenedState::zero(g);
  st.q = VolumeField::from_function(g, [&](Layer l, double x1, double x2, double z) {
    return eps * (l == Layer::plus ? 0.3 : -0.2) * std::cos(x1 + 2 * x2) * (1 + z * z) + eps * 0.1 * std::sin(x2);
  });
  st.u[0] = VolumeField::from_function(g, [&](Layer, double x1, double x2, double z) {
    return eps * std::sin(x1) * std::cos(x2) * (z + 1.0) * (z + 1.0);
  });
  st.u[1] = VolumeField::from_function(g, [&](Layer, double x1, double x2, double z) {
    return eps * 0.5 * std::cos(2 * x1 - x2) * (z + 1.0);
  });
  st.u[2] = VolumeField::from_function(g, [&](Layer l, double x1, double x2, double z) {
    return eps * (std::cos(x1) + 0.4 * std::sin(x1 + x2)) * (z + 1.0) * (l == Layer::plus ? 1.0 - 0.3 * z : 1.0);
  });
  st.eta_plus = SurfaceField::from_function(g, Surface::plus, [&](double x1, double x2) {
    return eps * (0.5 * std::cos(x1) + 0.2 * std::sin(x1 - x2));
  });
  st.eta_minus = SurfaceField::from_function(g, Surface::minus, [&](double x1, double x2) {
    return eps * (0.3 * std::cos(x2) - 0.25 * std::sin(2 * x1));
  });
  return st;
}

double max_abs(const std::vector<cplx>& v) {
  double m = 0;
  for (auto x : v) m = std::max(m, std::abs(x));
  return m;
}

double rel_diff(const VolumeField& a, const VolumeField& b) {
  return (a - b).max_abs_coeff() / std::max(1e-300, b.max_abs_coeff());
}

double rel_diff(const SurfaceField& a, const SurfaceField& b) {
  return max_abs((a - b).coeffs()) / std::max(1e-300, max_abs(b.coeffs()));
}

PhysField vert(const GridPtr& g, const std::function<double(Layer, int)>& f) {
  PhysField p(g);
  for (Layer l : {Layer::plus, Layer::minus})
    for (int i = 0; i < g->nv(l); ++i)
      for (int k = 0; k < g->npoints(); ++k) p.at(l, i, k) = f(l, i);
  return p;
}

PhysField dphys(const PhysField& f, int dir) { return d_dir(VolumeField::from_physical(f), dir).physical(); }

VolumeField dealiased(const PhysField& p) {
  auto v = VolumeField::from_physical(p);
  v.dealias();
  return v;
}

SurfaceField surf(const GridPtr& g, Surface w, const std::vector<double>& v) {
  auto s = SurfaceField::from_physical(g, w, v);
  s.dealias();
  return s;
}

}  // namespace

TEST(TaylorRemainder, ZeroAndQuadraticLaw) {
  auto s = make_setup(8, 12);
  const auto& g = s.g;
  VolumeField zero(g);
  EXPECT_EQ(taylor_remainder(zero, zero, *s.prof).max_abs_coeff(), 0.0);

  auto q = VolumeField::from_function(g, [](Layer, double x1, double, double z) { return 0.01 * std::cos(x1) * (1 + z); });
  auto th = VolumeField::from_function(g, [](Layer, double, double x2, double z) { return 0.02 * std::sin(x2) * z * z; });
  auto R = taylor_remainder(q, th, *s.prof).physical();
  const auto bg = sample_background(*s.prof, *g);
  const auto qp = q.physical(), tp = th.physical();
  for (Layer l : {Layer::plus, Layer::minus}) {
    const double K = l == Layer::plus ? 1.0 : 9.0;
    for (int i = 0; i < g->nv(l); ++i)
      for (int k = 0; k < g->npoints(); ++k) {
        const double d = qp.at(l, i, k) + bg.drho[layer_index(l)][i] * tp.at(l, i, k);
        EXPECT_NEAR(R.at(l, i, k), K * d * d, 1e-15 + 1e-12 * K * d * d);
      }
  }
  auto R2 = taylor_remainder(0.5 * q, 0.5 * th, *s.prof);
  EXPECT_NEAR(R2.max_abs_coeff() / taylor_remainder(q, th, *s.prof).max_abs_coeff(), 0.25, 1e-12);
}

TEST(TaylorRemainder, NonQuadraticLawScalesQuadratically) {
  PhysicalParams p;
  GridSpec gs;
  gs.n_h = 8;
  gs.n_v_plus = 12;
  gs.n_v_minus = 12;
  auto g = Grid::make(gs);
  auto prof = build_equilibrium(PressureLaw::polytropic(1, 1.4), PressureLaw::polytropic(3, 1.7), p, 32);
  auto q = VolumeField::from_function(g, [](Layer, double x1, double, double z) { return 0.01 * std::cos(x1) * (1 + z); });
  VolumeField th(g);
  double prev = taylor_remainder(q, th, prof).max_abs_coeff();
  for (int k = 1; k <= 3; ++k) {
    const double cur = taylor_remainder(std::pow(0.5, k) * q, th, prof).max_abs_coeff();
    EXPECT_NEAR(cur / prev, 0.25, 5e-3);
    prev = cur;
  }
}

TEST(TaylorRemainder, NonpositiveDensityRejected) {
  auto s = make_setup(8, 12);
  auto q = VolumeField::from_function(s.g, [](Layer, double, double, double) { return -10.0; });
  EXPECT_THROW(taylor_remainder(q, VolumeField(s.g), *s.prof), StateValidityError);
}

TEST(NonlinearTerms, ZeroStateGivesZero) {
  auto s = make_setup(8, 12);
  auto st = FlattenedState::zero(s.g);
  auto geo = build_theta(st.eta_plus, st.eta_minus, s.g);
  auto G = nonlinear_terms(st, geo, *s.prof, s.p);
  EXPECT_EQ(G.G1.max_abs_coeff(), 0.0);
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(G.G2[c].max_abs_coeff(), 0.0);
    EXPECT_EQ(max_abs(G.G3_plus[c].coeffs()), 0.0);
    EXPECT_EQ(max_abs(G.G3_minus[c].coeffs()), 0.0);
  }
  EXPECT_EQ(max_abs(G.G4_plus.coeffs()), 0.0);
  EXPECT_EQ(max_abs(G.G4_minus.coeffs()), 0.0);
}

TEST(NonlinearTerms, QuadraticScaling) {
  auto s = make_setup(16, 16);
  std::vector<std::array<double, 6>> norms;
  for (double eps : {1e-2, 5e-3, 2.5e-3}) {
    auto st = smooth_state(s.g, eps);
    auto geo = build_theta(st.eta_plus, st.eta_minus, s.g);
    auto G = nonlinear_terms(st, geo, *s.prof, s.p);
    std::array<double, 6> n{};
    n[0] = G.G1.max_abs_coeff();
    for (int c = 0; c < 3; ++c) {
      n[1] = std::max(n[1], G.G2[c].max_abs_coeff());
      n[2] = std::max(n[2], max_abs(G.G3_plus[c].coeffs()));
      n[3] = std::max(n[3], max_abs(G.G3_minus[c].coeffs()));
    }
    n[4] = max_abs(G.G4_plus.coeffs());
    n[5] = max_abs(G.G4_minus.coeffs());
    norms.push_back(n);
  }
  for (std::size_t k = 1; k < norms.size(); ++k)
    for (int j = 0; j < 6; ++j) {
      ASSERT_GT(norms[k - 1][j], 0.0) << j;
      EXPECT_NEAR(norms[k][j] / norms[k - 1][j], 0.25, 0.02) << "term " << j << " step " << k;
    }
}

TEST(NonlinearTerms, FlatSurfacesLeaveOnlyRemainderInStress) {
  auto s = make_setup(16, 16);
  auto st = smooth_state(s.g, 1e-2);
  st.eta_plus = SurfaceField(s.g, Surface::plus);
  st.eta_minus = SurfaceField(s.g, Surface::minus);
  auto geo = build_theta(st.eta_plus, st.eta_minus, s.g);
  auto G = nonlinear_terms(st, geo, *s.prof, s.p);
  EXPECT_EQ(max_abs(G.G3_plus[0].coeffs()), 0.0);
  EXPECT_EQ(max_abs(G.G3_plus[1].coeffs()), 0.0);
  EXPECT_EQ(max_abs(G.G3_minus[0].coeffs()), 0.0);
  EXPECT_EQ(max_abs(G.G3_minus[1].coeffs()), 0.0);
  auto Rtop = trace(G.remainder, TraceAt::top);
  Rtop.dealias();
  EXPECT_LT(rel_diff(G.G3_plus[2], -1.0 * Rtop), 1e-12);
  auto Rj = jump(G.remainder);
  Rj.dealias();
  EXPECT_LT(rel_diff(G.G3_minus[2], Rj), 1e-12);
  EXPECT_EQ(max_abs(G.G4_plus.coeffs()), 0.0);
}

// Term-by-term forcing formulas, evaluated independently.
TEST(NonlinearTerms, MatchesExplicitFormulas) {
  auto s = make_setup(24, 24);
  const auto& g = s.g;
  const auto& par = s.p;
  const auto& prof = *s.prof;
  auto st = smooth_state(g, 2e-2);
  auto geo = build_theta(st.eta_plus, st.eta_minus, g);
  auto G = nonlinear_terms(st, geo, prof, par);
  const auto bg = sample_background(prof, *g);
  const double grav = 1.0;

  auto V = [&](const std::array<std::vector<double>, 2>& a) {
    return vert(g, [&](Layer l, int i) { return a[layer_index(l)][i]; });
  };
  const PhysField rb = V(bg.rho), rb1 = V(bg.drho), rb2 = V(bg.d2rho);
  const PhysField mu = vert(g, [&](Layer l, int) { return par.mu(l); });
  const PhysField nu = vert(g, [&](Layer l, int) { return par.mu(l) / 3 + par.bulk(l); });
  const PhysField lam = vert(g, [&](Layer l, int) { return par.bulk(l) - 2 * par.mu(l) / 3; });
  const PhysField Kc = vert(g, [&](Layer l, int) { return l == Layer::plus ? 1.0 : 9.0; });

  const PhysField q = st.q.physical(), th = geo.theta_p, K = geo.K_p;
  std::array<PhysField, 3> u;
  std::array<std::array<PhysField, 3>, 3> du;
  std::array<std::array<std::array<PhysField, 3>, 3>, 3> ddu;  // ddu[i][k][m] = d_k d_m u_i
  for (int i = 0; i < 3; ++i) {
    u[i] = st.u[i].physical();
    for (int k = 0; k < 3; ++k) {
      const VolumeField dk = d_dir(st.u[i], k + 1);
      du[i][k] = dk.physical();
      for (int m = 0; m < 3; ++m) ddu[i][k][m] = d_dir(dk, m + 1).physical();
    }
  }
  const auto& A = geo.amat_p;
  std::array<std::array<std::array<PhysField, 3>, 3>, 3> dA;  // dA[l][m][k] = d_k A_lm
  for (int l = 0; l < 3; ++l)
    for (int m = 0; m < 3; ++m)
      for (int k = 0; k < 3; ++k) dA[l][m][k] = dphys(A[l][m], k + 1);
  auto delta_ = [](int a, int b) { return a == b ? 1.0 : 0.0; };

  // time derivative of theta from the kinematic relation
  const int tp = g->nv(Layer::plus) - 1, tm = g->nv(Layer::minus) - 1;
  auto eta_t = [&](const SurfaceField& eta, int node, Surface w) {
    const auto e1 = d_horizontal(eta, 1).physical(), e2 = d_horizontal(eta, 2).physical();
    std::vector<double> v(g->npoints());
    for (int k = 0; k < g->npoints(); ++k)
      v[k] = u[2].at(Layer::plus, node, k) - u[0].at(Layer::plus, node, k) * e1[k] - u[1].at(Layer::plus, node, k) * e2[k];
    return surf(g, w, v);
  };
  const PhysField tht = theta_only(eta_t(st.eta_plus, tp, Surface::plus), eta_t(st.eta_minus, 0, Surface::minus), g).physical();

  // G1
  const std::array<PhysField, 3> dq{dphys(q, 1), dphys(q, 2), dphys(q, 3)};
  PhysField G1 = K * tht * dq[2] + rb2 * K * th * tht;
  for (int l = 0; l < 3; ++l)
    for (int k = 0; k < 3; ++k) {
      G1 -= u[l] * A[l][k] * dq[k];
      G1 -= q * A[l][k] * du[l][k];
      G1 -= A[l][k] * dphys(rb1 * th * u[l], k + 1);
      G1 -= (A[l][k] - PhysField(g, delta_(l, k))) * dphys(rb * u[l], k + 1);
    }
  EXPECT_LT(rel_diff(G.G1, dealiased(G1)), 1e-8);

  // G2, with the velocity time derivative supplied by the implementation
  const PhysField delta = q + rb1 * th;
  const PhysField R = Kc * delta * delta;
  VolumeField hqv = st.q;
  hqv.scale_vertical(bg.hprime[0], bg.hprime[1]);
  const PhysField hq = hqv.physical();
  for (int i = 0; i < 3; ++i) {
    const PhysField dtu = G.dt_u[i].physical();
    PhysField G2 = -1.0 * (delta * dtu);
    PhysField transport = K * tht * du[i][2];
    for (int l = 0; l < 3; ++l)
      for (int k = 0; k < 3; ++k) transport -= u[l] * A[l][k] * du[i][k];
    G2 += (rb + delta) * transport;
    for (int l = 0; l < 3; ++l)
      for (int k = 0; k < 3; ++k)
        for (int m = 0; m < 3; ++m) {
          G2 += mu * A[l][k] * dA[l][m][k] * du[i][m];
          G2 += mu * (A[l][k] * A[l][m] - PhysField(g, delta_(l, k) * delta_(l, m))) * ddu[i][k][m];
          G2 += nu * A[i][k] * dA[l][m][k] * du[l][m];
          G2 += nu * (A[i][k] * A[l][m] - PhysField(g, delta_(i, k) * delta_(l, m))) * ddu[l][k][m];
        }
    for (int l = 0; l < 3; ++l) {
      G2 -= rb * (A[i][l] - PhysField(g, delta_(i, l))) * dphys(hq, l + 1);
      G2 -= A[i][l] * dphys(R, l + 1);
      G2 -= grav * (delta * A[i][l] * dphys(th, l + 1));
    }
    EXPECT_LT(rel_diff(G.G2[i], dealiased(G2)), 1e-7) << i;
  }

  // G3 on both surfaces
  auto stress_part = [&](Layer l, int node, const std::vector<double>& e1, const std::vector<double>& e2,
                         int i, int k, double sign_a3) {
    const double m = par.mu(l), la = par.bulk(l) - 2 * par.mu(l) / 3;
    const double n[3] = {-e1[k], -e2[k], 1.0};
    double v = 0;
    auto a = [&](int r, int c) { return A[r][c].at(l, node, k); };
    auto d = [&](int comp, int dir) { return du[comp][dir].at(l, node, k); };
    for (int kk = 0; kk < 3; ++kk)
      for (int ll = 0; ll < 3; ++ll) v += m * (a(i, ll) * d(kk, ll) + a(kk, ll) * d(i, ll)) * (n[kk] - delta_(kk, 2));
    for (int ll = 0; ll < 3; ++ll) {
      v += m * (a(i, ll) - delta_(i, ll)) * d(2, ll);
      v += sign_a3 * m * (a(2, ll) - delta_(2, ll)) * d(i, ll);
    }
    double div_a = 0, div_rest = 0;
    for (int ll = 0; ll < 3; ++ll)
      for (int kk = 0; kk < 3; ++kk) {
        div_a += a(ll, kk) * d(ll, kk);
        div_rest += (a(ll, kk) - delta_(ll, kk)) * d(ll, kk);
      }
    v += la * div_a * (n[i] - delta_(i, 2)) + la * div_rest * delta_(i, 2);
    v += -R.at(l, node, k) * n[i] + bg.dp[layer_index(l)][node] * q.at(l, node, k) * (delta_(i, 2) - n[i]);
    return v;
  };
  auto curvature = [&](const SurfaceField& eta) {
    const auto e1 = d_horizontal(eta, 1).physical(), e2 = d_horizontal(eta, 2).physical();
    std::vector<double> f1(e1.size()), f2(e1.size());
    for (std::size_t k = 0; k < e1.size(); ++k) {
      const double w = 1.0 / std::sqrt(1 + e1[k] * e1[k] + e2[k] * e2[k]) - 1.0;
      f1[k] = w * e1[k];
      f2[k] = w * e2[k];
    }
    return (d_horizontal(SurfaceField::from_physical(g, eta.which(), f1), 1) +
            d_horizontal(SurfaceField::from_physical(g, eta.which(), f2), 2)).physical();
  };
  {
    const auto e1 = d_horizontal(st.eta_plus, 1).physical(), e2 = d_horizontal(st.eta_plus, 2).physical();
    const auto lap = laplacian_h(st.eta_plus).physical(), cv = curvature(st.eta_plus);
    const auto ep = st.eta_plus.physical();
    for (int i = 0; i < 3; ++i) {
      std::vector<double> v(g->npoints());
      for (int k = 0; k < g->npoints(); ++k) {
        const double n[3] = {-e1[k], -e2[k], 1.0};
        const double g31 = stress_part(Layer::plus, tp, e1, e2, i, k, 1.0) + prof.rho1 * grav * ep[k] * (n[i] - delta_(i, 2));
        const double g32 = -lap[k] * (n[i] - delta_(i, 2)) - cv[k] * n[i];
        v[k] = g31 + par.sigma_plus * g32;
      }
      EXPECT_LT(rel_diff(G.G3_plus[i], surf(g, Surface::plus, v)), 1e-8) << i;
    }
  }
  {
    const auto e1 = d_horizontal(st.eta_minus, 1).physical(), e2 = d_horizontal(st.eta_minus, 2).physical();
    const auto lap = laplacian_h(st.eta_minus).physical(), cv = curvature(st.eta_minus);
    const auto em = st.eta_minus.physical();
    for (int i = 0; i < 3; ++i) {
      std::vector<double> v(g->npoints());
      for (int k = 0; k < g->npoints(); ++k) {
        const double n[3] = {-e1[k], -e2[k], 1.0};
        const double minus_g31 = stress_part(Layer::plus, 0, e1, e2, i, k, 1.0) -
                                 stress_part(Layer::minus, tm, e1, e2, i, k, 1.0) +
                                 prof.jump * grav * em[k] * (n[i] - delta_(i, 2));
        const double g32 = lap[k] * (n[i] - delta_(i, 2)) + cv[k] * n[i];
        v[k] = -minus_g31 - par.sigma_minus * g32;
      }
      EXPECT_LT(rel_diff(G.G3_minus[i], surf(g, Surface::minus, v)), 1e-8) << i;
    }
  }

  // G4
  {
    const auto e1 = d_horizontal(st.eta_plus, 1).physical(), e2 = d_horizontal(st.eta_plus, 2).physical();
    std::vector<double> v(g->npoints());
    for (int k = 0; k < g->npoints(); ++k)
      v[k] = -u[0].at(Layer::plus, tp, k) * e1[k] - u[1].at(Layer::plus, tp, k) * e2[k];
    EXPECT_LT(rel_diff(G.G4_plus, surf(g, Surface::plus, v)), 1e-12);
  }
}

TEST(NonlinearTerms, VelocityDerivativeSatisfiesMomentumEquation) {
  // rho (dt u - K theta_t d3 u + u . grad_A u) + rho_bar grad_A(h' q) + grad_A R + g delta grad_A theta
  // - div_A S_A u = 0, checked on the linear-plus-forcing form: rho_bar dt u + rho_bar grad(h'q) - div S u = G2.
  auto s = make_setup(16, 20);
  const auto& g = s.g;
  auto st = smooth_state(g, 1e-2);
  auto geo = build_theta(st.eta_plus, st.eta_minus, g);
  auto G = nonlinear_terms(st, geo, *s.prof, s.p);
  const auto bg = sample_background(*s.prof, *g);
  VolumeField hq = st.q;
  hq.scale_vertical(bg.hprime[0], bg.hprime[1]);
  VolumeField divu = d_dir(st.u[0], 1) + d_dir(st.u[1], 2) + d_dir(st.u[2], 3);
  for (int i = 0; i < 3; ++i) {
    VolumeField lhs = G.dt_u[i];
    lhs.scale_vertical(bg.rho[0], bg.rho[1]);
    VolumeField grad_hq = d_dir(hq, i + 1);
    grad_hq.scale_vertical(bg.rho[0], bg.rho[1]);
    lhs += grad_hq;
    VolumeField lap = d_dir(d_dir(st.u[i], 1), 1) + d_dir(d_dir(st.u[i], 2), 2) + d_dir(d_dir(st.u[i], 3), 3);
    std::vector<double> mp(g->nv(Layer::plus), s.p.mu_plus), mm(g->nv(Layer::minus), s.p.mu_minus);
    std::vector<double> np_(g->nv(Layer::plus), s.p.mu_plus / 3 + s.p.bulk_plus),
        nm_(g->nv(Layer::minus), s.p.mu_minus / 3 + s.p.bulk_minus);
    lap.scale_vertical(mp, mm);
    VolumeField gd = d_dir(divu, i + 1);
    gd.scale_vertical(np_, nm_);
    lhs -= lap;
    lhs -= gd;
    lhs.dealias();
    EXPECT_LT(rel_diff(lhs, G.G2[i]), 1e-6) << i;
  }
}
