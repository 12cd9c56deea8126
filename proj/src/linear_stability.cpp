#include "rtwave/linear_stability.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rtwave {

const char* row_kind_name(RowKind k) {
  switch (k) {
    case RowKind::continuity: return "continuity";
    case RowKind::momentum: return "momentum";
    case RowKind::kinematic: return "kinematic";
    case RowKind::stress_top: return "stress_top";
    case RowKind::velocity_jump: return "velocity_jump";
    case RowKind::stress_jump: return "stress_jump";
    case RowKind::no_slip: return "no_slip";
  }
  return "?";
}

namespace {

const cplx I(0.0, 1.0);

void assemble_into(const std::array<double, 2>& xi, const Background& bg, const EquilibriumProfile& prof,
                   const PhysicalParams& par, const Grid& grid, Eigen::MatrixXcd& A, Eigen::MatrixXcd& B,
                   std::vector<RowInfo>& rows, ModeLayout& L) {
  L.np = grid.nv(Layer::plus);
  L.nm = grid.nv(Layer::minus);
  const int n = L.size();
  A.setZero(n, n);
  B.setZero(n, n);
  rows.assign(n, RowInfo{RowKind::continuity, Layer::plus, -1, 0});
  const cplx ik[2] = {I * xi[0], I * xi[1]};
  const double k2 = xi[0] * xi[0] + xi[1] * xi[1];

  // Stress traction (P' q I - S u) e3, component c, of layer l at node i, added to row r with sign s.
  auto traction = [&](int r, Layer l, int i, int c, double s) {
    const int li = layer_index(l);
    const auto& D = grid.D(l);
    const double mu = par.mu(l), lam = par.bulk(l) - 2.0 * mu / 3.0;
    const int nn = L.n(l);
    if (c < 2) {
      A(r, L.u(l, 2, i)) += -s * mu * ik[c];
      for (int j = 0; j < nn; ++j) A(r, L.u(l, c, j)) += -s * mu * D(i, j);
    } else {
      A(r, L.q(l, i)) += s * bg.dp[li][i];
      for (int j = 0; j < nn; ++j) A(r, L.u(l, 2, j)) += -s * (2.0 * mu + lam) * D(i, j);
      A(r, L.u(l, 0, i)) += -s * lam * ik[0];
      A(r, L.u(l, 1, i)) += -s * lam * ik[1];
    }
  };

  for (Layer l : {Layer::plus, Layer::minus}) {
    const int li = layer_index(l);
    const int nn = L.n(l);
    const auto& D = grid.D(l);
    const auto& D2 = grid.D2(l);
    const auto& rho = bg.rho[li];
    const auto& hp = bg.hprime[li];
    const double mu = par.mu(l), nu = mu / 3.0 + par.bulk(l);
    for (int i = 0; i < nn; ++i) {
      // continuity: dt q = -div(rho u)
      const int r = L.q(l, i);
      rows[r] = {RowKind::continuity, l, -1, i};
      B(r, L.q(l, i)) = 1.0;
      A(r, L.u(l, 0, i)) += -rho[i] * ik[0];
      A(r, L.u(l, 1, i)) += -rho[i] * ik[1];
      for (int j = 0; j < nn; ++j) A(r, L.u(l, 2, j)) += -D(i, j) * rho[j];
    }
    for (int c = 0; c < 3; ++c)
      for (int i = 1; i < nn - 1; ++i) {
        const int r = L.u(l, c, i);
        rows[r] = {RowKind::momentum, l, c, i};
        B(r, L.u(l, c, i)) = rho[i];
        if (c < 2) {
          A(r, L.q(l, i)) += -rho[i] * ik[c] * hp[i];
        } else {
          for (int j = 0; j < nn; ++j) A(r, L.q(l, j)) += -rho[i] * D(i, j) * hp[j];
        }
        for (int j = 0; j < nn; ++j) A(r, L.u(l, c, j)) += mu * D2(i, j);
        A(r, L.u(l, c, i)) += -mu * k2;
        if (c < 2) {
          A(r, L.u(l, 0, i)) += nu * ik[c] * ik[0];
          A(r, L.u(l, 1, i)) += nu * ik[c] * ik[1];
          for (int j = 0; j < nn; ++j) A(r, L.u(l, 2, j)) += nu * ik[c] * D(i, j);
        } else {
          for (int j = 0; j < nn; ++j) {
            A(r, L.u(l, 0, j)) += nu * ik[0] * D(i, j);
            A(r, L.u(l, 1, j)) += nu * ik[1] * D(i, j);
            A(r, L.u(l, 2, j)) += nu * D2(i, j);
          }
        }
      }
  }

  const int tp = L.np - 1, tm = L.nm - 1;
  const double rho1 = prof.rho1;
  for (int c = 0; c < 3; ++c) {
    // top dynamic condition
    int r = L.u(Layer::plus, c, tp);
    rows[r] = {RowKind::stress_top, Layer::plus, c, tp};
    traction(r, Layer::plus, tp, c, 1.0);
    if (c == 2) A(r, L.eta(Layer::plus)) += -(rho1 * par.g + par.sigma_plus * k2);
    // velocity continuity
    r = L.u(Layer::plus, c, 0);
    rows[r] = {RowKind::velocity_jump, Layer::plus, c, 0};
    A(r, L.u(Layer::plus, c, 0)) += 1.0;
    A(r, L.u(Layer::minus, c, tm)) += -1.0;
    // interface dynamic condition
    r = L.u(Layer::minus, c, tm);
    rows[r] = {RowKind::stress_jump, Layer::minus, c, tm};
    traction(r, Layer::plus, 0, c, 1.0);
    traction(r, Layer::minus, tm, c, -1.0);
    if (c == 2) A(r, L.eta(Layer::minus)) += -(prof.jump * par.g - par.sigma_minus * k2);
    // bottom no-slip
    r = L.u(Layer::minus, c, 0);
    rows[r] = {RowKind::no_slip, Layer::minus, c, 0};
    A(r, L.u(Layer::minus, c, 0)) += 1.0;
  }
  for (Layer l : {Layer::plus, Layer::minus}) {
    const int r = L.eta(l);
    rows[r] = {RowKind::kinematic, l, -1, 0};
    B(r, r) = 1.0;
    A(r, l == Layer::plus ? L.u(Layer::plus, 2, tp) : L.u(Layer::minus, 2, tm)) += 1.0;
  }
}

}  // namespace

ModeOperator assemble_mode_operator(const std::array<double, 2>& xi, const Background& bg,
                                    const EquilibriumProfile& prof, const PhysicalParams& par,
                                    const Grid& grid, bool with_real_form) {
  ModeOperator op;
  op.xi = xi;
  assemble_into(xi, bg, prof, par, grid, op.A_mat, op.B_mat, op.rows, op.layout);
  if (!op.A_mat.allFinite()) throw NumericalError("mode operator has non-finite entries");
  if (with_real_form) {
    const double k = std::hypot(xi[0], xi[1]);
    Eigen::MatrixXcd Ar, Br;
    std::vector<RowInfo> rows;
    ModeLayout L;
    assemble_into({k, 0.0}, bg, prof, par, grid, Ar, Br, rows, L);
    // u1 = i v1 on both layers; rows of the first vector component are divided by i.
    for (Layer l : {Layer::plus, Layer::minus})
      for (int i = 0; i < L.n(l); ++i) {
        Ar.col(L.u(l, 0, i)) *= I;
        Br.col(L.u(l, 0, i)) *= I;
      }
    for (int r = 0; r < L.size(); ++r)
      if (rows[r].component == 0) {
        Ar.row(r) /= I;
        Br.row(r) /= I;
      }
    const double scale = std::max(1.0, Ar.cwiseAbs().maxCoeff());
    if (Ar.imag().cwiseAbs().maxCoeff() > 1e-13 * scale || Br.imag().cwiseAbs().maxCoeff() > 1e-13 * scale)
      throw NumericalError("rotated mode pencil is not real");
    op.A_real = Ar.real();
    op.B_real = Br.real();
  }
  return op;
}

ModeOperator assemble_mode_operator(const std::array<double, 2>& xi, const EquilibriumProfile& profile,
                                    const PhysicalParams& params, const Grid& grid) {
  return assemble_mode_operator(xi, sample_background(profile, grid), profile, params, grid, true);
}

GrowthRateResult growth_rate(const ModeOperator& op, const GrowthRateOptions& opt) {
  Eigen::MatrixXd A, B;
  if (op.A_real) {
    A = *op.A_real;
    B = *op.B_real;
  } else {
    const double scale = std::max(1.0, op.A_mat.cwiseAbs().maxCoeff());
    if (op.A_mat.imag().cwiseAbs().maxCoeff() <= 1e-14 * scale &&
        op.B_mat.imag().cwiseAbs().maxCoeff() <= 1e-14 * scale) {
      A = op.A_mat.real();
      B = op.B_mat.real();
    } else {
      // realification [Re -Im; Im Re]: every eigenvalue appears with its conjugate
      const int n = static_cast<int>(op.A_mat.rows());
      A.resize(2 * n, 2 * n);
      B.resize(2 * n, 2 * n);
      A << op.A_mat.real(), -op.A_mat.imag(), op.A_mat.imag(), op.A_mat.real();
      B << op.B_mat.real(), -op.B_mat.imag(), op.B_mat.imag(), op.B_mat.real();
    }
  }
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges;
  ges.setMaxIterations(std::max(400, 40 * static_cast<int>(A.rows())));
  ges.compute(A, B, false);
  if (ges.info() != Eigen::Success) {
    std::ostringstream os;
    os << "generalized eigensolver failed at xi = (" << op.xi[0] << ", " << op.xi[1]
       << "), |A| = " << A.norm() << ", |B| = " << B.norm();
    throw NumericalError(os.str());
  }
  GrowthRateResult res;
  res.xi = op.xi;
  const auto alphas = ges.alphas();
  const auto betas = ges.betas();
  const double bnorm = B.cwiseAbs().maxCoeff();
  const bool mean_mode = op.xi[0] == 0.0 && op.xi[1] == 0.0;
  for (int i = 0; i < alphas.size(); ++i) {
    if (std::abs(betas(i)) <= 1e-14 * bnorm) { ++res.n_filtered; continue; }
    const cplx lam = alphas(i) / betas(i);
    if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag()) || std::abs(lam) > opt.cutoff) {
      ++res.n_filtered;
      continue;
    }
    if (mean_mode && std::abs(lam) < opt.marginal_tol) {
      res.marginal.push_back(lam);
      continue;
    }
    res.spectrum.push_back(lam);
  }
  std::sort(res.spectrum.begin(), res.spectrum.end(),
            [](cplx a, cplx b) { return a.real() > b.real(); });
  if (!res.spectrum.empty()) res.lambda_max = res.spectrum.front();
  else res.lambda_max = cplx(-std::numeric_limits<double>::infinity(), 0.0);
  res.stable = res.lambda_max.real() < opt.stable_tol;
  return res;
}

GrowthRateResult growth_rate_verified(const std::array<double, 2>& xi, const EquilibriumProfile& prof,
                                      const PhysicalParams& par, const Grid& grid, double rel_tol,
                                      const GrowthRateOptions& opt) {
  auto r1 = growth_rate(assemble_mode_operator(xi, prof, par, grid), opt);
  GridSpec s = grid.spec();
  s.n_v_plus += 8;
  s.n_v_minus += 8;
  auto g2 = Grid::make(s);
  auto r2 = growth_rate(assemble_mode_operator(xi, prof, par, *g2), opt);
  GrowthRateResult out = r1;
  out.spectrum.clear();
  for (const auto& a : r1.spectrum) {
    bool found = false;
    for (const auto& b : r2.spectrum)
      if (std::abs(a - b) <= rel_tol * std::max(1.0, std::abs(a))) { found = true; break; }
    if (found) out.spectrum.push_back(a);
    else ++out.n_filtered;
  }
  out.lambda_max = out.spectrum.empty() ? cplx(-std::numeric_limits<double>::infinity(), 0.0) : out.spectrum.front();
  out.stable = out.lambda_max.real() < opt.stable_tol;
  return out;
}

Eigen::VectorXcd mode_eigenvector(const ModeOperator& op, cplx lambda) {
  const int n = static_cast<int>(op.A_mat.rows());
  const cplx shift = lambda + cplx(1e-9 * std::max(1.0, std::abs(lambda)), 1e-10);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(op.A_mat - shift * op.B_mat);
  Eigen::VectorXcd x = Eigen::VectorXcd::Ones(n);
  for (int it = 0; it < 6; ++it) {
    x = lu.solve(op.B_mat * x);
    x /= x.norm();
  }
  return x;
}

NeutralSigmaResult find_neutral_sigma(const EquilibriumProfile& prof, const PhysicalParams& par,
                                      const Grid& grid, const std::array<double, 2>& xi,
                                      const std::array<double, 2>& bracket) {
  if (!(prof.jump > 0.0)) throw BracketError("no instability to bracket: density jump is not positive");
  const Background bg = sample_background(prof, grid);
  NeutralSigmaResult res;
  res.sigma_c = prof.sigma_c;
  const double k2 = xi[0] * xi[0] + xi[1] * xi[1];
  res.per_mode_prediction = prof.jump * par.g / k2;
  auto f = [&](double s) {
    PhysicalParams p = par;
    p.sigma_minus = s;
    ++res.evaluations;
    return growth_rate(assemble_mode_operator(xi, bg, prof, p, grid, true)).lambda_max.real();
  };
  double lo = bracket[0], hi = bracket[1];
  const double flo = f(lo), fhi = f(hi);
  if (!(flo > 0.0 && fhi < 0.0)) {
    std::ostringstream os;
    os << "growth rate does not change sign on [" << lo << ", " << hi << "]: " << flo << ", " << fhi;
    throw BracketError(os.str());
  }
  const double tol = 1e-4 * std::abs(prof.sigma_c);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) lo = mid; else hi = mid;
  }
  res.sigma_star = 0.5 * (lo + hi);
  return res;
}

double sharp_poincare_constant(const Grid& grid) {
  double best = std::numeric_limits<double>::infinity();
  for (int m = 1; m < grid.nmodes(); ++m) {
    if (!grid.retained(m)) continue;
    const double a = grid.xi1(m), b = grid.xi2(m);
    best = std::min(best, a * a + b * b);
  }
  return best;
}

double poincare_ratio(const SurfaceField& z) {
  const double nz = sobolev_norm_surface(z, 0.0);
  if (std::abs(z[0]) > 1e-14 * std::max(1e-300, nz)) throw DataError("poincare_ratio requires a zero-mean field");
  const double g1 = sobolev_norm_surface(d_horizontal(z, 1), 0.0);
  const double g2 = sobolev_norm_surface(d_horizontal(z, 2), 0.0);
  return (g1 * g1 + g2 * g2) / (nz * nz);
}

PositivityReport energy_form_positivity(const EquilibriumProfile& prof, const PhysicalParams& par,
                                        const Grid& grid, bool with_constraints) {
  const Background bg = sample_background(prof, grid);
  const int np = grid.nv(Layer::plus), nm = grid.nv(Layer::minus);
  const int n = np + nm + 2;
  PositivityReport rep;
  rep.min_quotient = std::numeric_limits<double>::infinity();
  for (int mode = 0; mode < grid.nmodes(); ++mode) {
    if (!grid.retained(mode)) continue;
    const double k2 = grid.kabs(mode) * grid.kabs(mode);
    Eigen::VectorXd q(n), w(n);
    const auto& wp = grid.weights(Layer::plus);
    const auto& wm = grid.weights(Layer::minus);
    for (int i = 0; i < np; ++i) { q(i) = wp[i] * bg.hprime[0][i]; w(i) = wp[i]; }
    for (int i = 0; i < nm; ++i) { q(np + i) = wm[i] * bg.hprime[1][i]; w(np + i) = wm[i]; }
    q(np + nm) = prof.rho1 * par.g + par.sigma_plus * k2;
    q(np + nm + 1) = -prof.jump * par.g + par.sigma_minus * k2;
    w(np + nm) = 1.0;
    w(np + nm + 1) = 1.0;
    Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(n, n);
    if (with_constraints && mode == 0) {
      Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2, n);
      for (int i = 0; i < np; ++i) C(0, i) = wp[i];
      C(0, np + nm) = prof.rho1;
      C(0, np + nm + 1) = -prof.rho_top_of_interface;
      for (int i = 0; i < nm; ++i) C(1, np + i) = wm[i];
      C(1, np + nm + 1) = prof.rho_bot_of_interface;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
      Z = lu.kernel();
    }
    const Eigen::MatrixXd Q = Z.transpose() * q.asDiagonal() * Z;
    const Eigen::MatrixXd N = Z.transpose() * w.asDiagonal() * Z;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, N, Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues().minCoeff();
    if (mn < rep.min_quotient) {
      rep.min_quotient = mn;
      rep.argmin_mode = {grid.n1(mode), grid.n2(mode)};
    }
  }
  rep.positive = rep.min_quotient > 0.0;
  return rep;
}

}  // namespace rtwave
