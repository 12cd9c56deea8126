#pragma once

#include <Eigen/Dense>
#include <vector>

namespace rtwave {

/// n Chebyshev-Gauss-Lobatto points on [a, c], ascending, endpoints exact.
std::vector<double> cgl_nodes(int n, double a, double c);

/// Collocation differentiation matrix on the CGL points of [a, c].
Eigen::MatrixXd cgl_diff_matrix(int n, double a, double c);

/// Clenshaw-Curtis weights on the CGL points of [a, c].
std::vector<double> clenshaw_curtis_weights(int n, double a, double c);

/// Barycentric interpolation of CGL samples to an arbitrary point.
double cgl_interpolate(const std::vector<double>& nodes, const std::vector<double>& values,
                       double x);

}  // namespace rtwave
