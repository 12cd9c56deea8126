#include "rtwave/chebyshev.hpp"

#include <cmath>
#include <stdexcept>

#include "rtwave/common.hpp"

namespace rtwave {

namespace {

std::vector<double> bary_weights(int n) {
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) {
    w[j] = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == n - 1) w[j] *= 0.5;
  }
  return w;
}

}  // namespace

std::vector<double> cgl_nodes(int n, double a, double c) {
  if (n < 2) throw std::invalid_argument("cgl_nodes needs n >= 2");
  std::vector<double> x(n);
  const int N = n - 1;
  for (int j = 0; j < n; ++j) {
    // sin form keeps the nodes symmetric to rounding
    const double y = std::sin(pi * (2.0 * j - N) / (2.0 * N));
    x[j] = a + 0.5 * (y + 1.0) * (c - a);
  }
  x.front() = a;
  x.back() = c;
  return x;
}

Eigen::MatrixXd cgl_diff_matrix(int n, double a, double c) {
  const int N = n - 1;
  std::vector<double> y(n);
  for (int j = 0; j < n; ++j) y[j] = std::sin(pi * (2.0 * j - N) / (2.0 * N));
  const auto w = bary_weights(n);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      D(i, j) = (w[j] / w[i]) / (y[i] - y[j]);
      diag -= D(i, j);
    }
    D(i, i) = diag;
  }
  return D * (2.0 / (c - a));
}

std::vector<double> clenshaw_curtis_weights(int n, double a, double c) {
  const int N = n - 1;
  std::vector<double> w(n, 0.0);
  // Weights on cos(pi j / N); the ascending grid is the reverse, and the
  // weights are symmetric.
  for (int j = 0; j <= N; ++j) {
    const double th = pi * j / N;
    double v = 1.0;
    if (j == 0 || j == N) {
      if (N % 2 == 0) {
        w[j] = 1.0 / (N * N - 1.0);
      } else {
        w[j] = 1.0 / (static_cast<double>(N) * N);
      }
      continue;
    }
    if (N % 2 == 0) {
      for (int k = 1; k < N / 2; ++k) v -= 2.0 * std::cos(2.0 * k * th) / (4.0 * k * k - 1.0);
      v -= std::cos(N * th) / (N * N - 1.0);
    } else {
      for (int k = 1; k <= (N - 1) / 2; ++k) v -= 2.0 * std::cos(2.0 * k * th) / (4.0 * k * k - 1.0);
    }
    w[j] = 2.0 * v / N;
  }
  for (auto& x : w) x *= 0.5 * (c - a);
  return w;
}

double cgl_interpolate(const std::vector<double>& nodes, const std::vector<double>& values,
                       double x) {
  const int n = static_cast<int>(nodes.size());
  const auto w = bary_weights(n);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j) {
    const double d = x - nodes[j];
    if (d == 0.0) return values[j];
    num += w[j] / d * values[j];
    den += w[j] / d;
  }
  return num / den;
}

}  // namespace rtwave
