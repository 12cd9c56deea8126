#include "rtwave/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <sstream>

#include "rtwave/chebyshev.hpp"

namespace rtwave {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

std::shared_ptr<const Grid> Grid::make(const GridSpec& spec) {
  return std::shared_ptr<const Grid>(new Grid(spec));
}

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  auto bad = [](const char* f, const char* rule) {
    std::ostringstream os;
    os << "grid." << f << ": " << rule;
    throw ConfigError(os.str());
  };
  if (spec.n_h < 4 || spec.n_h % 2 != 0) bad("n_h", "must be even and >= 4");
  if (spec.n_v_plus < 8) bad("n_v_plus", "must be >= 8");
  if (spec.n_v_minus < 8) bad("n_v_minus", "must be >= 8");
  if (!(spec.L1 > 0) || !(spec.L2 > 0)) bad("L1", "periods must be positive");
  if (!(spec.ell > 0) || !(spec.b > 0)) bad("ell", "layer heights must be positive");

  const double lo[2] = {0.0, -spec.b};
  const double hi[2] = {spec.ell, 0.0};
  const int n[2] = {spec.n_v_plus, spec.n_v_minus};
  for (int l = 0; l < 2; ++l) {
    nodes_[l] = cgl_nodes(n[l], lo[l], hi[l]);
    D_[l] = cgl_diff_matrix(n[l], lo[l], hi[l]);
    D2_[l] = D_[l] * D_[l];
    w_[l] = clenshaw_curtis_weights(n[l], lo[l], hi[l]);
  }

  std::lock_guard<std::mutex> lock(planner_mutex());
  const int N = spec.n_h;
  auto* buf = fftw_alloc_complex(static_cast<size_t>(N) * N);
  plan_fwd_ = fftw_plan_dft_2d(N, N, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_bwd_ = fftw_plan_dft_2d(N, N, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
}

Grid::~Grid() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

int Grid::mode_index(int a, int b) const {
  const int N = nh();
  const int i1 = ((a % N) + N) % N;
  const int i2 = ((b % N) + N) % N;
  return i1 * N + i2;
}

double Grid::kabs(int mode) const { return std::hypot(xi1(mode), xi2(mode)); }

bool Grid::is_nyquist(int mode) const {
  return mode / nh() == nh() / 2 || mode % nh() == nh() / 2;
}

bool Grid::dealiased(int mode) const {
  const int cut = nh() / 3;
  return std::abs(n1(mode)) <= cut && std::abs(n2(mode)) <= cut && !is_nyquist(mode);
}

double Grid::min_spacing() const {
  double h = std::numeric_limits<double>::infinity();
  for (int l = 0; l < 2; ++l)
    for (std::size_t i = 1; i < nodes_[l].size(); ++i) h = std::min(h, nodes_[l][i] - nodes_[l][i - 1]);
  return h;
}

void Grid::to_physical(const cplx* coeffs, double* values) const {
  const int M = nmodes();
  std::vector<cplx> tmp(coeffs, coeffs + M);
  auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), p, p);
  for (int i = 0; i < M; ++i) values[i] = tmp[i].real();
}

void Grid::to_spectral(const double* values, cplx* coeffs) const {
  const int M = nmodes();
  for (int i = 0; i < M; ++i) coeffs[i] = cplx(values[i], 0.0);
  auto* p = reinterpret_cast<fftw_complex*>(coeffs);
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), p, p);
  const double s = 1.0 / M;
  for (int i = 0; i < M; ++i) coeffs[i] *= s;
}

}  // namespace rtwave
