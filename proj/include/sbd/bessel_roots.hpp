#pragma once

#include <vector>

namespace sbd {

// First P positive roots of J0, found by safeguarded Newton inside the
// bracket [pi(p - 1/4), pi(p - 1/8)]; residual |J0(root)| < 1e-13.
std::vector<double> dirichlet_roots(int P);

// First P positive solutions of r J0'(r) + H J0(r) = 0 (H >= 0), residual
// below 1e-12. For H = 0 these are the roots of J1 and the constant mode
// must be handled separately by the caller.
std::vector<double> robin_roots(double H, int P);

// k-th positive root of J1 (k >= 1).
double j1_root(int k);

// Roots of J1 ordered by distance from omega (ties broken toward the
// smaller root); count distinct roots returned.
std::vector<double> j1_roots_near(double omega, int count);

// First positive root of Y0 (~0.8936).
double first_y0_root();

// Smallest root of Y0 that is >= k.
double y0_root_above(double k);

} // namespace sbd
