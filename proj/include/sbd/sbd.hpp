#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "sbd/basis.hpp"
#include "sbd/kernels.hpp"

namespace sbd {

// Least-squares Bessel expansion of a radial kernel on the annulus a < r < 1:
// G(r) ~ constant_offset + sum_p coeffs[p] * C_p J0(rho_p * radial_scale * r).
// radial_scale is 1 for a direct fit; a dilated fit (Helmholtz rescaling)
// stores the dilation here so that downstream consumers see the represented
// function, not the fit variable.
struct SBDecomposition {
    double a = 0.0;
    int P = 0;
    std::vector<double> coeffs;
    BesselBasis basis;
    double constant_offset = 0.0;
    double achieved_error = 0.0;
    double radial_scale = 1.0;

    double gamma() const { return P * a; }
};

double eval_sbd(const SBDecomposition& sbd, double r);

struct SbdConvergenceError : std::runtime_error {
    double best_error;
    int best_P;
    SbdConvergenceError(double err, int P)
        : std::runtime_error("solve_sbd: tolerance not reached at P_max (best " +
                             std::to_string(err) + " at P=" + std::to_string(P)),
          best_error(err), best_P(P) {}
};

struct SolveOptions {
    int P_max = 0;                         // 0: ceil(8/a) + oscillation margin
    BoundaryCondition boundary = Dirichlet{};
    bool subtract_offset = true;           // constant_offset = G(1); off for Robin fits
    int validation_points = 2048;          // geometric grid on [a, 1]
};

// Single solve at fixed order P (no adaptivity).
SBDecomposition fit_sbd(const RadialKernel& kernel, double a, int P,
                        const SolveOptions& opts = {});

// Adaptive order selection: dichotomy for the smallest P whose validation
// L-inf error meets tol. Throws SbdConvergenceError when P_max is hit.
SBDecomposition solve_sbd(const RadialKernel& kernel, double a, double tol, int P_max = 0);
SBDecomposition solve_sbd_opts(const RadialKernel& kernel, double a, double tol,
                               const SolveOptions& opts);

// Condition number of the Gram matrix used for a decomposition's final solve.
double sbd_gram_condition(const SBDecomposition& sbd);

// Subtracts K(r) = sum_t mu_t J0(omega_t r) chosen to annihilate the boundary
// Laplacian iterates (-Delta)^t G|_{r=1} up to order n. The omega_t are the
// J1 roots closest to the square root of the mean ratio of successive
// iterates; mu solves the small linear system M mu = lambda with
// M_{t,s} = omega_s^{2t} J0(omega_s).
struct MultiDirichletResult {
    RadialKernel kernel;
    std::vector<std::pair<double, double>> correction; // (omega_t, mu_t)
};

MultiDirichletResult enforce_multi_dirichlet(const RadialKernel& kernel, int n);

} // namespace sbd
