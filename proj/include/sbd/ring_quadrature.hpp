#pragma once

#include <vector>

#include "sbd/sbd.hpp"
#include "sbd/vec2.hpp"

namespace sbd {

// Calibrated safety constant for the circular quadrature error bound
// |J0(r|x|) - (1/M) sum e^{i r x.xi_m}| <= K_safe (e r / 2M)^M, M >= (e/2) r.
// Set to twice the supremum of |error| / (er/2M)^M measured on a dense
// (r, M) grid; the calibration is re-checked by the test suite.
inline constexpr double kRingQuadratureKSafe = 4.0;

// Smallest even M >= 4 with (e/2) rho + log(K_safe / tol) guaranteeing the
// quadrature error <= tol on the unit disk. Even M makes the nodes antipodal
// in pairs, so real kernels keep an exactly real quadrature sum.
int ring_size(double rho, double tol);

// One ring of the discrete spectrum: M equispaced directions at radius rho,
// total complex weight `weight` spread uniformly (per-node weight/M).
struct RingSpec {
    double rho = 0.0;
    cplx weight;
};

// Flat frequency/weight list realizing G(x) ~ sum_v w_v e^{i x.xi_v} for
// a <= |x| <= 1. ring_offsets[p] is the first index of ring p;
// ring_offsets.back() == freqs.size(). A constant offset rides as a single
// zero-frequency term (its own "ring").
struct FrequencyQuadrature {
    std::vector<Vec2> freqs;
    std::vector<cplx> weights;
    std::vector<int> ring_offsets;
    double total_error_budget = 0.0;

    int size() const { return (int)freqs.size(); }
    int ring_count() const { return (int)ring_offsets.size() - 1; }
};

// Assembles the quadrature for an explicit ring list plus constant term;
// per-ring tolerance eps / (2 R |weight_p|) with R the number of rings.
FrequencyQuadrature build_ring_quadrature(const std::vector<RingSpec>& rings,
                                          double constant_offset, double eps);

// Converts a decomposition into its sparse spectrum. Requires
// eps >= 2 * sbd.achieved_error (the budget is split evenly between the
// radial fit and the circular quadrature); throws std::invalid_argument
// otherwise.
FrequencyQuadrature flatten(const SBDecomposition& sbd, double eps);

// Reference evaluator: plain sum over all nodes.
cplx eval_gapprox(const FrequencyQuadrature& q, const Vec2& x);

} // namespace sbd
