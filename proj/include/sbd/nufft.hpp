#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "sbd/vec2.hpp"

namespace sbd {

enum class NufftSign : int { Plus = +1, Minus = -1 };

// Exact O(N_z * N_xi) evaluation of q_v = sum_k e^{sign * i z_k . xi_v} c_k.
// The correctness oracle for the fast path.
std::vector<cplx> ndft_direct(const std::vector<Vec2>& points, const std::vector<Vec2>& freqs,
                              const std::vector<cplx>& coeffs, NufftSign sign);

struct NufftOptions {
    double tol = 1e-9;
    enum class Mode { Auto, Direct, Fast } mode = Mode::Auto;
    // Auto falls back to the direct sum when N_z * N_xi is at most this.
    std::uint64_t direct_threshold = std::uint64_t(1) << 20;
    std::uint64_t max_grid_bytes = std::uint64_t(4) << 30;
};

// Type-III plan: arbitrary points, arbitrary frequencies. Fast path is
// Kaiser-Bessel gridding -> oversampled FFT -> Kaiser-Bessel frequency
// interpolation, with analytic window transforms on both sides.
// Immutable after construction; apply() is safe to call concurrently.
class NufftPlan {
  public:
    NufftPlan(std::vector<Vec2> points, std::vector<Vec2> freqs, NufftSign sign,
              NufftOptions options = {});
    ~NufftPlan();
    NufftPlan(NufftPlan&&) noexcept;
    NufftPlan& operator=(NufftPlan&&) noexcept;
    NufftPlan(const NufftPlan&) = delete;
    NufftPlan& operator=(const NufftPlan&) = delete;

    // coeffs.size() must equal the number of points; returns one value per
    // frequency. Accuracy: max-norm error <= tol * sum |coeffs|.
    std::vector<cplx> apply(const std::vector<cplx>& coeffs) const;

    // Exact transpose of apply() as a linear map (same stages in reverse
    // order, bitwise-consistent with the forward approximation): maps one
    // value per frequency to one per point.
    std::vector<cplx> apply_transpose(const std::vector<cplx>& values) const;

    bool fast_path() const;
    int kernel_width() const;
    std::uint64_t grid_cells() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper.
std::vector<cplx> nufft(const std::vector<Vec2>& points, const std::vector<Vec2>& freqs,
                        const std::vector<cplx>& coeffs, NufftSign sign, double tol);

} // namespace sbd
