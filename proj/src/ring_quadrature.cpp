#include "sbd/ring_quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sbd {

namespace {
constexpr double kE = std::numbers::e;
constexpr double kPi = std::numbers::pi;
} // namespace

int ring_size(double rho, double tol) {
    if (!(tol > 0.0)) throw std::domain_error("ring_size: tol must be positive");
    if (rho < 0.0) throw std::domain_error("ring_size: rho must be nonnegative");
    const double extra = std::max(0.0, std::log(kRingQuadratureKSafe / tol));
    int m = (int)std::ceil(0.5 * kE * rho + extra);
    m = std::max(m, 4);
    if (m & 1) ++m;
    return m;
}

FrequencyQuadrature build_ring_quadrature(const std::vector<RingSpec>& rings,
                                          double constant_offset, double eps) {
    if (!(eps > 0.0)) throw std::domain_error("build_ring_quadrature: eps must be positive");
    FrequencyQuadrature q;
    q.total_error_budget = eps;

    int active = 0;
    for (const auto& r : rings)
        if (std::abs(r.weight) > 0.0) ++active;

    std::size_t total = constant_offset != 0.0 ? 1 : 0;
    std::vector<int> sizes;
    sizes.reserve(rings.size());
    for (const auto& r : rings) {
        if (std::abs(r.weight) == 0.0) {
            sizes.push_back(0);
            continue;
        }
        const double ring_tol = eps / (2.0 * active * std::abs(r.weight));
        sizes.push_back(ring_size(r.rho, ring_tol));
        total += sizes.back();
    }

    q.freqs.reserve(total);
    q.weights.reserve(total);
    q.ring_offsets.reserve(rings.size() + 2);

    if (constant_offset != 0.0) {
        q.ring_offsets.push_back(0);
        q.freqs.push_back({0.0, 0.0});
        q.weights.push_back({constant_offset, 0.0});
    }
    for (std::size_t i = 0; i < rings.size(); ++i) {
        if (sizes[i] == 0) continue;
        q.ring_offsets.push_back((int)q.freqs.size());
        const int m = sizes[i];
        const cplx node_weight = rings[i].weight / (double)m;
        for (int j = 0; j < m; ++j) {
            const double theta = 2.0 * kPi * j / m;
            q.freqs.push_back({rings[i].rho * std::cos(theta), rings[i].rho * std::sin(theta)});
            q.weights.push_back(node_weight);
        }
    }
    q.ring_offsets.push_back((int)q.freqs.size());
    return q;
}

FrequencyQuadrature flatten(const SBDecomposition& sbd, double eps) {
    if (!(eps > 0.0)) throw std::domain_error("flatten: eps must be positive");
    if (eps < 2.0 * sbd.achieved_error)
        throw std::invalid_argument("flatten: eps below twice the decomposition error budget");
    std::vector<RingSpec> rings;
    rings.reserve(sbd.P);
    for (int p = 0; p < sbd.P; ++p) {
        const double amp = sbd.coeffs[p] * sbd.basis.norm_constants[p];
        rings.push_back({sbd.basis.roots[p] * sbd.radial_scale, cplx(amp, 0.0)});
    }
    return build_ring_quadrature(rings, sbd.constant_offset, eps);
}

cplx eval_gapprox(const FrequencyQuadrature& q, const Vec2& x) {
    cplx acc(0.0, 0.0);
    for (int i = 0; i < q.size(); ++i) {
        const double phase = dot(x, q.freqs[i]);
        acc += q.weights[i] * cplx(std::cos(phase), std::sin(phase));
    }
    return acc;
}

} // namespace sbd
