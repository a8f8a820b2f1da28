#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "sbd/vec2.hpp"

namespace sbd {

// A radial kernel G together with the metadata the decomposition needs:
// derivative, iterated boundary Laplacians (-Delta)^t G|_{r=1}, singularity
// flag, and the dominant oscillation wavenumber (0 for monotone kernels) used
// to size the search bracket for oscillatory fits. Immutable; user-supplied
// callables must be pure.
struct RadialKernel {
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
    std::vector<double> laplacian_iterates_at_one; // (-Delta)^t G|_{r=1}, t = 1..n
    bool singular_at_origin = false;
    double oscillation_freq = 0.0;
    std::string name;
};

// G(r) = log r. Harmonic away from the origin, so every boundary Laplacian
// iterate vanishes.
RadialKernel laplace_kernel();

// Wraps user callables; validates eval/deriv consistency by central finite
// differences on [0.1, 1] (relative 1e-6) and throws std::invalid_argument on
// mismatch.
RadialKernel user_kernel(std::function<double(double)> eval, std::function<double(double)> deriv,
                         std::vector<double> laplacian_iterates_at_one, std::string name = "user",
                         double oscillation_freq = 0.0);

// Regime selection for decomposing Y0(k r) (the Helmholtz kernel's singular
// part) in dilated J0 series.
struct RootOfY0 {};
struct RescaledToRoot {
    double k_prime = 0.0; // smallest Y0 root >= k
};
struct RobinRegime {
    double H = 0.0; // -k Y0'(k) / Y0(k) > 0
};

struct HelmholtzPlan {
    double k = 0.0;
    std::variant<RootOfY0, RescaledToRoot, RobinRegime> regime;
};

// small_k_factor: k counts as "much smaller than the first Y0 root" when
// k < small_k_factor * first_y0_root (then the Robin basis is used).
HelmholtzPlan helmholtz_plan(double k, double small_k_factor = 0.5);

// What the compressed operator decomposes. Laplace and Helmholtz carry their
// analytic structure; User is fitted as-is.
struct KernelSpec {
    enum class Kind { Laplace, Helmholtz, User };
    Kind kind = Kind::Laplace;
    double k = 0.0; // Helmholtz wavenumber (physical units)
    RadialKernel user;

    // Pointwise kernel value at distance r > 0 (complex for Helmholtz:
    // -(i/4) H1(k r) = (1/4) Y0(kr) - (i/4) J0(kr)).
    cplx value(double r) const;
    bool is_complex() const { return kind == Kind::Helmholtz; }
};

KernelSpec kernel_laplace();
KernelSpec kernel_helmholtz(double k);
KernelSpec kernel_user(RadialKernel k);

} // namespace sbd
