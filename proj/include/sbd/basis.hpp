#pragma once

#include <variant>
#include <vector>

namespace sbd {

struct Dirichlet {};
struct Robin {
    double H = 0.0;
};
using BoundaryCondition = std::variant<Dirichlet, Robin>;

// Radial eigenbasis e_p(r) = C_p J0(rho_p r) on the unit ball, normalized to
// unit energy norm (gradient norm for Dirichlet, gradient + H boundary term
// for Robin). Immutable after construction, safe to share across threads.
struct BesselBasis {
    std::vector<double> roots;          // rho_p, strictly increasing
    std::vector<double> norm_constants; // C_p > 0
    BoundaryCondition boundary;

    int order_count() const { return (int)roots.size(); }
    bool is_dirichlet() const { return std::holds_alternative<Dirichlet>(boundary); }
    double robin_h() const { return std::get<Robin>(boundary).H; }

    // e_p(r), 1-based index p.
    double eval(int p, double r) const;
};

// Normalization constant for a Dirichlet root: 1 / (sqrt(pi) rho |J1(rho)|).
double norm_constant(int p, double rho_p);

BesselBasis make_dirichlet_basis(int P);
BesselBasis make_robin_basis(double H, int P);

} // namespace sbd
