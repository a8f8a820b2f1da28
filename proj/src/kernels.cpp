#include "sbd/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "sbd/bessel.hpp"
#include "sbd/bessel_roots.hpp"

namespace sbd {

RadialKernel laplace_kernel() {
    RadialKernel k;
    k.eval = [](double r) {
        if (!(r > 0.0)) throw std::domain_error("laplace kernel: r must be positive");
        return std::log(r);
    };
    k.deriv = [](double r) {
        if (!(r > 0.0)) throw std::domain_error("laplace kernel: r must be positive");
        return 1.0 / r;
    };
    k.laplacian_iterates_at_one = {0.0, 0.0, 0.0, 0.0};
    k.singular_at_origin = true;
    k.name = "laplace";
    return k;
}

RadialKernel user_kernel(std::function<double(double)> eval, std::function<double(double)> deriv,
                         std::vector<double> laplacian_iterates_at_one, std::string name,
                         double oscillation_freq) {
    if (!eval || !deriv) throw std::invalid_argument("user_kernel: eval and deriv are required");
    // Step small enough that the O(h^2 w^2) truncation term stays below the
    // 1e-6 relative tolerance for a kernel oscillating at frequency w.
    const double h = oscillation_freq > 0.0 ? std::min(1e-5, 2e-3 / oscillation_freq) : 1e-5;
    for (int i = 0; i <= 16; ++i) {
        const double r = 0.1 + 0.9 * i / 16.0;
        const double fd = (eval(r + h) - eval(r - h)) / (2.0 * h);
        const double d = deriv(r);
        const double scale = std::max({std::fabs(d), std::fabs(fd), 1.0});
        if (std::fabs(fd - d) > 1e-6 * scale)
            throw std::invalid_argument("user_kernel: eval/deriv finite-difference check failed near r=" +
                                        std::to_string(r));
    }
    RadialKernel k;
    k.eval = std::move(eval);
    k.deriv = std::move(deriv);
    k.laplacian_iterates_at_one = std::move(laplacian_iterates_at_one);
    k.singular_at_origin = true; // conservative default: fit on the annulus only
    k.oscillation_freq = oscillation_freq;
    k.name = std::move(name);
    return k;
}

HelmholtzPlan helmholtz_plan(double k, double small_k_factor) {
    if (!(k > 0.0)) throw std::domain_error("helmholtz_plan: k must be positive");
    HelmholtzPlan plan;
    plan.k = k;
    if (std::fabs(bessel_y0(k)) < 1e-10) {
        plan.regime = RootOfY0{};
    } else if (k < small_k_factor * first_y0_root()) {
        const double H = -k * (-bessel_y1(k)) / bessel_y0(k); // Y0' = -Y1
        plan.regime = RobinRegime{H};
    } else {
        plan.regime = RescaledToRoot{y0_root_above(k)};
    }
    return plan;
}

cplx KernelSpec::value(double r) const {
    switch (kind) {
        case Kind::Laplace:
            if (!(r > 0.0)) throw std::domain_error("kernel value: r must be positive");
            return {std::log(r), 0.0};
        case Kind::Helmholtz:
            if (!(r > 0.0)) throw std::domain_error("kernel value: r must be positive");
            return {0.25 * bessel_y0(k * r), -0.25 * bessel_j0(k * r)};
        case Kind::User:
            return {user.eval(r), 0.0};
    }
    throw std::logic_error("kernel value: bad kind");
}

KernelSpec kernel_laplace() {
    KernelSpec s;
    s.kind = KernelSpec::Kind::Laplace;
    return s;
}

KernelSpec kernel_helmholtz(double k) {
    if (!(k > 0.0)) throw std::domain_error("kernel_helmholtz: k must be positive");
    KernelSpec s;
    s.kind = KernelSpec::Kind::Helmholtz;
    s.k = k;
    return s;
}

KernelSpec kernel_user(RadialKernel k) {
    KernelSpec s;
    s.kind = KernelSpec::Kind::User;
    s.user = std::move(k);
    return s;
}

} // namespace sbd
