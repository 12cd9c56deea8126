#include "rtwave/functional_checks.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <random>

#include "rtwave/chebyshev.hpp"
#include "rtwave/fields.hpp"
#include "rtwave/geometry.hpp"

namespace rtwave {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

// Quadratic forms of one layer for one mode on the layer unknowns (3 n, component-major).
void layer_forms(const MatrixXd& D, const std::vector<double>& w, double xi1, double xi2, MatrixXcd& QD,
                 MatrixXcd& Q1) {
  const int n = static_cast<int>(w.size());
  const cplx I(0.0, 1.0);
  // P[k]: derivative in direction k acting on one component
  std::array<MatrixXcd, 3> P;
  P[0] = (I * xi1) * MatrixXcd::Identity(n, n);
  P[1] = (I * xi2) * MatrixXcd::Identity(n, n);
  P[2] = D.cast<cplx>();
  Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), n);
  const MatrixXcd W = wv.cast<cplx>().asDiagonal();
  auto place = [&](const MatrixXcd& op, int comp) {
    MatrixXcd M = MatrixXcd::Zero(n, 3 * n);
    M.block(0, comp * n, n, n) = op;
    return M;
  };
  MatrixXcd div = MatrixXcd::Zero(n, 3 * n);
  for (int k = 0; k < 3; ++k) div += place(P[k], k);
  QD = MatrixXcd::Zero(3 * n, 3 * n);
  Q1 = MatrixXcd::Zero(3 * n, 3 * n);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      MatrixXcd M = place(P[i], j) + place(P[j], i);
      if (i == j) M -= (2.0 / 3.0) * div;
      QD += M.adjoint() * W * M;
    }
  for (int c = 0; c < 3; ++c) {
    const MatrixXcd V = place(MatrixXcd::Identity(n, n), c);
    Q1 += V.adjoint() * W * V;
    for (int k = 0; k < 3; ++k) {
      const MatrixXcd G = place(P[k], c);
      Q1 += G.adjoint() * W * G;
    }
  }
}

double polynomial_residual(const std::array<std::vector<double>, 3>& x, const std::array<MatrixXd, 3>& Dm,
                           const std::array<double, 3>& a, const std::array<double, 3>& omega, double gamma,
                           const std::array<double, 3>& b) {
  const int n0 = static_cast<int>(x[0].size()), n1 = static_cast<int>(x[1].size()),
            n2 = static_cast<int>(x[2].size());
  auto idx = [&](int i, int j, int k) { return (i * n1 + j) * n2 + k; };
  const int N = n0 * n1 * n2;
  std::array<std::vector<double>, 3> u;
  for (auto& c : u) c.assign(N, 0.0);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j)
      for (int k = 0; k < n2; ++k) {
        const std::array<double, 3> p{x[0][i], x[1][j], x[2][k]};
        const std::array<double, 3> rot{omega[1] * p[2] - omega[2] * p[1], omega[2] * p[0] - omega[0] * p[2],
                                        omega[0] * p[1] - omega[1] * p[0]};
        const double bx = b[0] * p[0] + b[1] * p[1] + b[2] * p[2];
        const double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        for (int c = 0; c < 3; ++c) u[c][idx(i, j, k)] = a[c] + rot[c] + gamma * p[c] + bx * p[c] - 0.5 * b[c] * r2;
      }
  // du[c][d] = d_d u_c by applying the 1-D matrix along axis d
  std::array<std::array<std::vector<double>, 3>, 3> du;
  for (int c = 0; c < 3; ++c)
    for (int d = 0; d < 3; ++d) {
      auto& out = du[c][d];
      out.assign(N, 0.0);
      for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j)
          for (int k = 0; k < n2; ++k) {
            double s = 0.0;
            const int m = d == 0 ? n0 : (d == 1 ? n1 : n2);
            for (int r = 0; r < m; ++r) {
              const int src = d == 0 ? idx(r, j, k) : (d == 1 ? idx(i, r, k) : idx(i, j, r));
              const int row = d == 0 ? i : (d == 1 ? j : k);
              s += Dm[d](row, r) * u[c][src];
            }
            out[idx(i, j, k)] = s;
          }
    }
  double worst = 0.0;
  for (int p = 0; p < N; ++p) {
    const double div = du[0][0][p] + du[1][1][p] + du[2][2][p];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double e = du[j][i][p] + du[i][j][p];
        if (i == j) e -= 2.0 * div / 3.0;
        worst = std::max(worst, std::abs(e));
      }
  }
  return worst;
}

double gradient_norm(const VolumeField& f, Layer l, int q) {
  std::vector<VolumeField> level{f};
  for (int r = 0; r < q; ++r) {
    std::vector<VolumeField> next;
    for (const auto& v : level)
      for (int d = 1; d <= 3; ++d) next.push_back(d_dir(v, d));
    level = std::move(next);
  }
  const Grid& g = *f.grid();
  const auto& w = g.weights(l);
  double s = 0.0;
  for (const auto& v : level)
    for (int i = 0; i < g.nv(l); ++i)
      for (int m = 0; m < g.nmodes(); ++m) s += w[i] * std::norm(v.at(l, i, m));
  return std::sqrt(s * g.area());
}

}  // namespace

KornReport korn_constant_estimate(const GridPtr& grid, bool bottom_dirichlet) {
  const Grid& g = *grid;
  const int np = g.nv(Layer::plus), nm = g.nv(Layer::minus);
  const int full = 3 * (np + nm);
  // free unknowns: all upper nodes, lower nodes below the interface (bottom only if free)
  const int lo = bottom_dirichlet ? 1 : 0;
  const int nfree = 3 * np + 3 * (nm - 1 - lo);
  MatrixXcd Z = MatrixXcd::Zero(full, nfree);
  int col = 0;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < np; ++i) Z(c * np + i, col++) = 1.0;
  for (int c = 0; c < 3; ++c) {
    for (int i = lo; i < nm - 1; ++i) Z(3 * np + c * nm + i, col++) = 1.0;
    Z(3 * np + c * nm + nm - 1, c * np) = 1.0;  // interface value equals the upper node 0
  }
  KornReport rep;
  rep.bottom_dirichlet = bottom_dirichlet;
  rep.minimum = std::numeric_limits<double>::infinity();
  for (int m = 0; m < g.nmodes(); ++m) {
    if (!g.dealiased(m)) continue;
    const int a = g.n1(m), b = g.n2(m);
    if (a < 0 || (a == 0 && b < 0)) continue;  // conjugate modes give the same quotient
    MatrixXcd QD = MatrixXcd::Zero(full, full), Q1 = MatrixXcd::Zero(full, full);
    MatrixXcd d, h;
    layer_forms(g.D(Layer::plus), g.weights(Layer::plus), g.xi1(m), g.xi2(m), d, h);
    QD.topLeftCorner(3 * np, 3 * np) = d;
    Q1.topLeftCorner(3 * np, 3 * np) = h;
    layer_forms(g.D(Layer::minus), g.weights(Layer::minus), g.xi1(m), g.xi2(m), d, h);
    QD.bottomRightCorner(3 * nm, 3 * nm) = d;
    Q1.bottomRightCorner(3 * nm, 3 * nm) = h;
    MatrixXcd A = Z.adjoint() * QD * Z, B = Z.adjoint() * Q1 * Z;
    A = 0.5 * (A + A.adjoint()).eval();
    B = 0.5 * (B + B.adjoint()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> es(A, B, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("korn_constant_estimate: eigensolver failed");
    const double v = es.eigenvalues().minCoeff();
    if (v < rep.minimum) {
      rep.minimum = v;
      rep.n1 = a;
      rep.n2 = b;
    }
  }
  return rep;
}

KernelReport deviatoric_kernel_check(const GridPtr& grid, int samples, std::uint64_t seed) {
  const Grid& g = *grid;
  const int n = 8;
  std::array<std::vector<double>, 3> x{cgl_nodes(n, 0.0, 2.0 * pi * g.L1()), cgl_nodes(n, 0.0, 2.0 * pi * g.L2()),
                                       cgl_nodes(n, -g.b(), g.ell())};
  std::array<MatrixXd, 3> Dm{cgl_diff_matrix(n, 0.0, 2.0 * pi * g.L1()), cgl_diff_matrix(n, 0.0, 2.0 * pi * g.L2()),
                             cgl_diff_matrix(n, -g.b(), g.ell())};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  KernelReport rep;
  rep.samples = samples;
  for (int s = 0; s < samples; ++s) {
    const std::array<double, 3> a{nd(rng), nd(rng), nd(rng)}, om{nd(rng), nd(rng), nd(rng)},
        b{nd(rng), nd(rng), nd(rng)};
    const double gamma = nd(rng);
    rep.max_residual = std::max(rep.max_residual, polynomial_residual(x, Dm, a, om, gamma, b));
  }
  // linear map of the ten parameters to the values on the bottom plane
  const double z = -g.b();
  MatrixXd M(3 * n * n, 10);
  int row = 0;
  for (double x1 : x[0])
    for (double x2 : x[1]) {
      const std::array<double, 3> p{x1, x2, z};
      const double r2 = x1 * x1 + x2 * x2 + z * z;
      for (int c = 0; c < 3; ++c) {
        Eigen::Matrix<double, 10, 1> r = Eigen::Matrix<double, 10, 1>::Zero();
        r(c) = 1.0;
        // A x = omega x p with (omega x p)_c = omega_{c1} p_{c2} - omega_{c2} p_{c1}
        const int c1 = (c + 1) % 3, c2 = (c + 2) % 3;
        r(3 + c1) = p[c2];
        r(3 + c2) = -p[c1];
        r(6) = p[c];
        for (int k = 0; k < 3; ++k) r(7 + k) = p[k] * p[c] - (k == c ? 0.5 * r2 : 0.0);
        M.row(row++) = r.transpose();
      }
    }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(M);
  qr.setThreshold(1e-10);
  rep.rank = static_cast<int>(qr.rank());
  return rep;
}

bool PoissonBoundReport::pass() const {
  for (int q = 0; q < 3; ++q)
    if (!(worst[q] <= bound[q] * (1.0 + 1e-8))) return false;
  return trials > 0;
}

PoissonBoundReport poisson_bound_ratios(const GridPtr& grid, int trials, std::uint64_t seed) {
  const Grid& g = *grid;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  PoissonBoundReport rep;
  rep.trials = trials;
  rep.bound = {1.0, 1.0, std::sqrt(2.0)};
  const int kmax = std::min(4, g.nh() / 2 - 1);
  const VandermondeCoeffs coeffs = default_vandermonde();
  for (int t = 0; t < trials; ++t) {
    for (Surface w : {Surface::plus, Surface::minus}) {
      SurfaceField f(grid, w);
      for (int a = -kmax; a <= kmax; ++a)
        for (int b = -kmax; b <= kmax; ++b) {
          const int m = g.mode_index(a, b), mc = g.mode_index(-a, -b);
          if (m == 0 || m > mc) continue;
          const cplx c(nd(rng), nd(rng));
          f[m] = c;
          f[mc] = std::conj(c);
        }
      const Layer l = w == Surface::plus ? Layer::plus : Layer::minus;
      const VolumeField ext = w == Surface::plus ? poisson_extend_upper(f, grid) : poisson_extend_lower(f, coeffs, grid);
      for (int q = 0; q <= 2; ++q)
        rep.worst[q] = std::max(rep.worst[q], gradient_norm(ext, l, q) / sobolev_norm_surface(f, q - 0.5));
    }
  }
  return rep;
}

}  // namespace rtwave
