#include "rtwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rtwave {

VandermondeCoeffs vandermonde_coefficients(const std::vector<double>& lambdas, int m) {
  if (m < 0 || static_cast<int>(lambdas.size()) != m + 1)
    throw std::invalid_argument("vandermonde_coefficients: need m + 1 lambdas");
  for (int j = 0; j <= m; ++j) {
    if (!(lambdas[j] > 0.0)) throw NumericalError("Vandermonde lambdas must be positive");
    for (int k = 0; k < j; ++k)
      if (lambdas[k] == lambdas[j]) throw NumericalError("Vandermonde matrix is singular: repeated lambda");
  }
  // alpha_j is the Lagrange basis polynomial of the nodes -lambda_k evaluated
  // at 1, which is the exact solution of the unit right-hand side.
  VandermondeCoeffs out;
  out.lambdas = lambdas;
  out.alphas.resize(m + 1);
  for (int j = 0; j <= m; ++j) {
    long double p = 1.0L;
    for (int k = 0; k <= m; ++k) {
      if (k == j) continue;
      p *= (1.0L + lambdas[k]) / (static_cast<long double>(lambdas[k]) - lambdas[j]);
    }
    out.alphas[j] = static_cast<double>(p);
  }
  for (int i = 0; i <= m; ++i) {
    long double s = 0.0L;
    for (int j = 0; j <= m; ++j) {
      long double pw = 1.0L;
      for (int r = 0; r < i; ++r) pw *= -static_cast<long double>(lambdas[j]);
      s += out.alphas[j] * pw;
    }
    out.max_residual = std::max(out.max_residual, static_cast<double>(std::abs(s - 1.0L)));
  }
  if (!(out.max_residual < 1e-10)) throw NumericalError("Vandermonde solve residual above 1e-10");
  return out;
}

VandermondeCoeffs default_vandermonde(int m) {
  std::vector<double> l(m + 1);
  for (int j = 0; j <= m; ++j) l[j] = j + 1.0;
  return vandermonde_coefficients(l, m);
}

VolumeField poisson_extend_upper(const SurfaceField& eta, const GridPtr& grid) {
  VolumeField out(grid);
  const double ell = grid->ell();
  for (Layer l : {Layer::plus, Layer::minus}) {
    const auto& z = grid->nodes(l);
    for (int i = 0; i < grid->nv(l); ++i)
      for (int m = 0; m < grid->nmodes(); ++m) {
        if (eta[m] == 0.0) continue;
        out.at(l, i, m) = std::exp(grid->kabs(m) * (z[i] - ell)) * eta[m];
      }
  }
  return out;
}

VolumeField poisson_extend_lower(const SurfaceField& eta, const VandermondeCoeffs& c,
                                 const GridPtr& grid) {
  VolumeField out(grid);
  for (Layer l : {Layer::plus, Layer::minus}) {
    const auto& z = grid->nodes(l);
    for (int i = 0; i < grid->nv(l); ++i)
      for (int m = 0; m < grid->nmodes(); ++m) {
        if (eta[m] == 0.0) continue;
        const double k = grid->kabs(m);
        double f;
        if (l == Layer::minus) {
          f = std::exp(k * z[i]);
        } else {
          f = 0.0;
          for (std::size_t j = 0; j < c.alphas.size(); ++j) f += c.alphas[j] * std::exp(-k * c.lambdas[j] * z[i]);
        }
        out.at(l, i, m) = f * eta[m];
      }
  }
  return out;
}

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep_d1(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 30.0 * t * t * (1.0 - t) * (1.0 - t);
}

double blend_upper(Layer l, double x3, double ell, double /*b*/) {
  return l == Layer::plus ? smoothstep(x3 / ell) : 0.0;
}

double blend_lower(Layer l, double x3, double ell, double b) {
  return l == Layer::plus ? 1.0 - smoothstep(x3 / ell) : smoothstep((x3 + b) / b);
}

VolumeField theta_only(const SurfaceField& eta_plus, const SurfaceField& eta_minus, const GridPtr& grid,
                       const VandermondeCoeffs& coeffs) {
  const VolumeField ep = poisson_extend_upper(eta_plus, grid);
  const VolumeField em = poisson_extend_lower(eta_minus, coeffs, grid);
  VolumeField theta(grid);
  for (Layer l : {Layer::plus, Layer::minus}) {
    const auto& z = grid->nodes(l);
    for (int i = 0; i < grid->nv(l); ++i) {
      const double b1 = blend_upper(l, z[i], grid->ell(), grid->b());
      const double b2 = blend_lower(l, z[i], grid->ell(), grid->b());
      for (int m = 0; m < grid->nmodes(); ++m)
        theta.at(l, i, m) = b1 * ep.at(l, i, m) + b2 * em.at(l, i, m);
    }
  }
  return theta;
}

GeometryFields build_theta(const SurfaceField& eta_plus, const SurfaceField& eta_minus,
                           const GridPtr& grid, const VandermondeCoeffs& coeffs) {
  GeometryFields g;
  g.grid = grid;
  g.theta = theta_only(eta_plus, eta_minus, grid, coeffs);
  g.A = d_horizontal(g.theta, 1);
  g.B = d_horizontal(g.theta, 2);
  g.J = d_vertical(g.theta);
  for (Layer l : {Layer::plus, Layer::minus})
    for (int i = 0; i < grid->nv(l); ++i) g.J.at(l, i, 0) += 1.0;

  g.theta_p = g.theta.physical();
  g.A_p = g.A.physical();
  g.B_p = g.B.physical();
  g.J_p = g.J.physical();
  g.K_p = PhysField(grid);
  for (Layer l : {Layer::plus, Layer::minus}) {
    auto& k = g.K_p.layer(l);
    const auto& j = g.J_p.layer(l);
    for (std::size_t n = 0; n < k.size(); ++n) k[n] = 1.0 / j[n];
  }
  g.K = VolumeField::from_physical(g.K_p);

  const PhysField one(grid, 1.0), zero(grid, 0.0);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) g.amat_p[r][c] = (r == c) ? one : zero;
  g.amat_p[0][2] = -1.0 * (g.A_p * g.K_p);
  g.amat_p[1][2] = -1.0 * (g.B_p * g.K_p);
  g.amat_p[2][2] = g.K_p;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) g.Amat[r][c] = VolumeField::from_physical(g.amat_p[r][c]);

  SurfaceField unit(grid, Surface::plus);
  unit[0] = 1.0;
  g.n_plus = {-1.0 * d_horizontal(eta_plus, 1), -1.0 * d_horizontal(eta_plus, 2), unit};
  SurfaceField unit_m(grid, Surface::minus);
  unit_m[0] = 1.0;
  g.n_minus = {-1.0 * d_horizontal(eta_minus, 1), -1.0 * d_horizontal(eta_minus, 2), unit_m};
  return g;
}

std::string DiffeoReport::summary() const {
  std::ostringstream os;
  os << "|J-1|=" << j_minus_1 << " |A|=" << a_sup << " |B|=" << b_sup << " |N-e3|=" << normal_deviation
     << " |K-1|_surface=" << k_minus_1_surface << (pass ? " pass" : " FAIL");
  return os.str();
}

DiffeoReport smallness_check(const GeometryFields& f) {
  DiffeoReport r;
  const Grid& g = *f.grid;
  for (Layer l : {Layer::plus, Layer::minus}) {
    for (double v : f.J_p.layer(l)) r.j_minus_1 = std::max(r.j_minus_1, std::abs(v - 1.0));
    for (double v : f.A_p.layer(l)) r.a_sup = std::max(r.a_sup, std::abs(v));
    for (double v : f.B_p.layer(l)) r.b_sup = std::max(r.b_sup, std::abs(v));
  }
  for (const auto* n : {&f.n_plus, &f.n_minus}) {
    const auto n1 = (*n)[0].physical();
    const auto n2 = (*n)[1].physical();
    for (std::size_t p = 0; p < n1.size(); ++p)
      r.normal_deviation = std::max(r.normal_deviation, std::hypot(n1[p], n2[p]));
  }
  const int top = g.nv(Layer::plus) - 1;
  const int im = g.nv(Layer::minus) - 1;
  for (int p = 0; p < g.npoints(); ++p) {
    r.k_minus_1_surface = std::max({r.k_minus_1_surface, std::abs(f.K_p.at(Layer::plus, top, p) - 1.0),
                                    std::abs(f.K_p.at(Layer::plus, 0, p) - 1.0),
                                    std::abs(f.K_p.at(Layer::minus, im, p) - 1.0)});
  }
  r.pass = (r.j_minus_1 + r.a_sup + r.b_sup <= 0.5) && (r.normal_deviation + r.k_minus_1_surface <= 0.5);
  for (Layer l : {Layer::plus, Layer::minus})
    for (double v : f.J_p.layer(l))
      if (!(v > 0.0)) r.pass = false;
  return r;
}

}  // namespace rtwave
