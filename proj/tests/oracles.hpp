#pragma once

// Independent reference implementations the tests check the library against.
// Each one avoids the code path it verifies: the sine integral comes from
// composite Gauss-Legendre quadrature instead of series/continued fractions,
// the soliton center value from a radial ODE shooting method instead of the
// spectral fixed-point iteration, and the operator spectra from dense matrix
// assembly plus a dense symmetric eigendecomposition instead of matrix-free
// Krylov iterations.

#include <Eigen/Dense>

#include "nlsgap/birman_schwinger.hpp"
#include "nlsgap/grid.hpp"

namespace nlsgap::oracle {

// Si(x) for x >= 0 by composite 20-point Gauss-Legendre panels of length <= 2.
double si_gauss(double x);

// phi(0) of the radial ground state u'' + (2/r)u' - u + u^{2 beta + 1} = 0 by
// RK4 shooting with bisection on u(0) in [4, 5] (valid near beta = 1).
double shooting_phi0(double beta, double rmax = 15.0, double step = 1e-3);

// Dense n x n matrix of the Birman-Schwinger operator via the circular
// convolution kernel: K[a,b] = scale * U[a] * w[wrap(a - b)] * U[b].
Eigen::MatrixXd dense_bs_matrix(const BSOperator& op);

// Descending eigenvalues of a dense symmetric matrix.
std::vector<double> dense_top_eigs(const Eigen::MatrixXd& K, int k);

}  // namespace nlsgap::oracle
