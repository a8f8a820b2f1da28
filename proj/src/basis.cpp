#include "sbd/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sbd/bessel.hpp"
#include "sbd/bessel_roots.hpp"

namespace sbd {

double BesselBasis::eval(int p, double r) const {
    return norm_constants[p - 1] * bessel_j0(roots[p - 1] * r);
}

double norm_constant(int p, double rho_p) {
    if (p < 1) throw std::domain_error("norm_constant: p must be positive");
    const double j1 = std::fabs(bessel_j1(rho_p));
    if (j1 == 0.0) throw std::runtime_error("norm_constant: J1 vanishes at the root");
    return 1.0 / (std::sqrt(std::numbers::pi) * rho_p * j1);
}

BesselBasis make_dirichlet_basis(int P) {
    BesselBasis b;
    b.boundary = Dirichlet{};
    b.roots = dirichlet_roots(P);
    b.norm_constants.reserve(P);
    for (int p = 1; p <= P; ++p) b.norm_constants.push_back(norm_constant(p, b.roots[p - 1]));
    return b;
}

BesselBasis make_robin_basis(double H, int P) {
    BesselBasis b;
    b.boundary = Robin{H};
    b.roots = robin_roots(H, P);
    b.norm_constants.reserve(P);
    // a_H(e, e) = 1 with a_H(u, v) = int_B grad u . grad v + H * oint u v.
    // For u = J0(rho r): int_B |grad u|^2 = 2 pi rho^2 int_0^1 r J1(rho r)^2 dr
    // = pi [rho^2 (J0(rho)^2 + J1(rho)^2) - 2 rho J0(rho) J1(rho)], and the
    // boundary term adds 2 pi H J0(rho)^2.
    for (double rho : b.roots) {
        const double j0 = bessel_j0(rho);
        const double j1 = bessel_j1(rho);
        const double energy = std::numbers::pi * (rho * rho * (j0 * j0 + j1 * j1) - 2.0 * rho * j0 * j1) +
                              2.0 * std::numbers::pi * H * j0 * j0;
        if (!(energy > 0.0)) throw std::runtime_error("make_robin_basis: nonpositive mode energy");
        b.norm_constants.push_back(1.0 / std::sqrt(energy));
    }
    return b;
}

} // namespace sbd
