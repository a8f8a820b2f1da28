#pragma once

#include <Eigen/Dense>

#include "sbd/basis.hpp"
#include "sbd/kernels.hpp"

namespace sbd {

// Gram matrix A of the normalized basis on the annulus a < r < 1,
// A_ij = int_A grad e_i . grad e_j (+ the H boundary term for a Robin basis).
// Symmetric, eigenvalues in (0, 1].
struct GramMatrix {
    Eigen::MatrixXd entries;
    double a = 0.0;

    int dim() const { return (int)entries.rows(); }
};

// Closed-form assembly (no quadrature). Throws std::domain_error for
// a outside (0, 1) and std::runtime_error for coincident roots.
GramMatrix assemble_gram(const BesselBasis& basis, double a);

// Right-hand side b_p = -2 pi C_p rho_p int_a^1 r G'(r) J1(rho_p r) dr,
// panel Gauss-Legendre with >= 10 points per oscillation of J1(rho_p r),
// refined to relative 1e-12.
Eigen::VectorXd assemble_rhs(const RadialKernel& kernel, const BesselBasis& basis, double a);

// F(gamma) of the small-gamma conditioning bound, evaluated through the exact
// antiderivative of the defining integral.
double conditioning_F(double gamma);

// First positive root of F (~1.471).
double conditioning_F_root();

struct LambdaMinBounds {
    double theorem_bound = 0.0;    // F(gamma) - pi^4 gamma^4 / (144 P)
    double conjecture_bound = 0.0; // 180 exp(-5.8 gamma)
};

LambdaMinBounds lambda_min_bound(double gamma, int P);

// Extremal eigenvalues of a symmetric matrix (helper for diagnostics).
std::pair<double, double> symmetric_eigen_range(const Eigen::MatrixXd& A);

} // namespace sbd
