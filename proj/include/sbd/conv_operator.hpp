#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "sbd/kernels.hpp"
#include "sbd/nufft.hpp"
#include "sbd/point_cloud.hpp"
#include "sbd/ring_quadrature.hpp"
#include "sbd/sbd.hpp"

namespace sbd {

// a = |log eps|^{2/3} / N_z^{2/3 - alpha}, clamped to (0, 0.5], with the order
// hint P ~ c_P |log eps| / a. Requires N_z > |log eps|.
struct ChosenParameters {
    double a = 0.0;
    int P_hint = 0;
};
ChosenParameters choose_parameters(std::uint64_t N_z, double eps, double alpha);

struct AssembleOptions {
    double eps = 1e-6;
    double alpha = 0.0;      // in [0, 1/6]
    double a_override = 0.0; // > 0 replaces the N-based formula
    double small_k_factor = 0.5;
    std::uint64_t nufft_direct_threshold = std::uint64_t(1) << 20;
    std::uint64_t max_grid_bytes = std::uint64_t(4) << 30;
};

// Compressed discrete convolution q_k = sum_l G(z_k - z_l) f_l: a sparse
// frequency quadrature for the far field plus a sparse close-correction
// matrix D inside radius delta_min. Immutable after assembly; apply() and
// apply_adjoint() are safe to call concurrently.
class CompressedOperator {
  public:
    static CompressedOperator assemble(const KernelSpec& kernel, PointCloud source,
                                       PointCloud target, const AssembleOptions& opts);
    // Single-cloud variant: self-pairs are excluded and the diagonal of D
    // cancels the far-field self contribution exactly.
    static CompressedOperator assemble(const KernelSpec& kernel, PointCloud cloud,
                                       const AssembleOptions& opts);

    ~CompressedOperator();
    CompressedOperator(CompressedOperator&&) noexcept;
    CompressedOperator& operator=(CompressedOperator&&) noexcept;

    // q = NUFFT+[target](w * NUFFT-[source](f)) + D f; error contract
    // max_k |q_k - sum_l G(z_k - z_l) f_l| <= eps * sum_l |f_l|.
    std::vector<cplx> apply(const std::vector<cplx>& f) const;
    // Conjugate-transpose action (target-sized input, source-sized output).
    std::vector<cplx> apply_adjoint(const std::vector<cplx>& u) const;

    const PointCloud& source() const;
    const PointCloud& target() const;
    bool single_cloud() const;
    const FrequencyQuadrature& quadrature() const; // physical frequencies
    const SparsePairMatrix& close_matrix() const;
    const KernelSpec& kernel() const;
    double eps() const;
    double delta_min() const;
    double delta_max() const;
    double annulus_a() const;
    const SBDecomposition& decomposition() const;

    // Analytic byte count of the owned buffers (clouds, quadrature, D and the
    // forward NUFFT tables). Lazily built adjoint plans are not counted.
    std::uint64_t bytes() const;

    void save(const std::string& path) const;
    static CompressedOperator load(const std::string& path);

  private:
    CompressedOperator();
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace sbd
