#include "sbd/gram.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sbd/bessel.hpp"
#include "sbd/quadrature.hpp"

namespace sbd {

namespace {

constexpr double kPi = std::numbers::pi;

// F_i(r) = rho_i^2 r^2 [J0(rho_i r)^2 + J0'(rho_i r)^2]/2 + rho_i r J0 J0'.
double diag_term(double rho, double r) {
    const double j0 = bessel_j0(rho * r);
    const double j1 = bessel_j1(rho * r);
    return 0.5 * rho * rho * r * r * (j0 * j0 + j1 * j1) - rho * r * j0 * j1;
}

} // namespace

GramMatrix assemble_gram(const BesselBasis& basis, double a) {
    if (!(a > 0.0 && a < 1.0)) throw std::domain_error("assemble_gram: a must lie in (0, 1)");
    const int P = basis.order_count();
    const double H = basis.is_dirichlet() ? 0.0 : basis.robin_h();

    // Cache the Bessel values at both annulus ends once per root.
    std::vector<double> j0a(P), j1a(P), j01(P), j11(P);
    for (int i = 0; i < P; ++i) {
        const double rho = basis.roots[i];
        j0a[i] = bessel_j0(rho * a);
        j1a[i] = bessel_j1(rho * a);
        j01[i] = bessel_j0(rho);
        j11[i] = bessel_j1(rho);
    }

    GramMatrix g;
    g.a = a;
    g.entries.resize(P, P);
    for (int i = 0; i < P; ++i) {
        const double rho_i = basis.roots[i];
        const double c_i = basis.norm_constants[i];
        g.entries(i, i) = 2.0 * kPi * c_i * c_i * (diag_term(rho_i, 1.0) - diag_term(rho_i, a)) +
                          2.0 * kPi * H * c_i * c_i * j01[i] * j01[i];
        for (int j = i + 1; j < P; ++j) {
            const double rho_j = basis.roots[j];
            // Lommel: int_a^1 r J1(bi r) J1(bj r) dr =
            //   [r (bi J0(bi r) J1(bj r) - bj J1(bi r) J0(bj r))]_a^1 / (bj^2 - bi^2),
            // i.e. the cross difference over (bi^2 - bj^2) in the F notation.
            const double denom = rho_i * rho_i - rho_j * rho_j;
            if (denom == 0.0) throw std::runtime_error("assemble_gram: coincident basis roots");
            const double c_j = basis.norm_constants[j];
            const double fij1 = -rho_i * j01[i] * j11[j];
            const double fji1 = -rho_j * j01[j] * j11[i];
            const double fija = -rho_i * a * j0a[i] * j1a[j];
            const double fjia = -rho_j * a * j0a[j] * j1a[i];
            double v = 2.0 * kPi * c_i * c_j * rho_i * rho_j / denom * (fij1 - fji1 - fija + fjia);
            v += 2.0 * kPi * H * c_i * c_j * j01[i] * j01[j];
            g.entries(i, j) = v;
            g.entries(j, i) = v;
        }
    }
    return g;
}

Eigen::VectorXd assemble_rhs(const RadialKernel& kernel, const BesselBasis& basis, double a) {
    if (!(a > 0.0 && a < 1.0)) throw std::domain_error("assemble_rhs: a must lie in (0, 1)");
    const int P = basis.order_count();
    Eigen::VectorXd b(P);
    for (int p = 0; p < P; ++p) {
        const double rho = basis.roots[p];
        const auto integrand = [&](double r) { return r * kernel.deriv(r) * bessel_j1(rho * r); };
        // >= 10 nodes per oscillation of J1(rho r) across [a, 1].
        const int panels0 = std::max(4, (int)std::ceil((1.0 - a) * rho * 10.0 / (2.0 * kPi * 16.0)));
        const double integral = integrate_adaptive(integrand, a, 1.0, 1e-12, panels0);
        if (!std::isfinite(integral))
            throw std::runtime_error("assemble_rhs: integration failed (non-integrable derivative?)");
        b(p) = -2.0 * kPi * basis.norm_constants[p] * rho * integral;
    }
    return b;
}

double conditioning_F(double gamma) {
    // F(gamma) = 1 - int_0^{pi gamma} (t/2)(J1^2 - J0 J2) dt. Using
    // int_0^T t J1(t)^2 dt = (T^2/2)(J1^2 - J0 J2) and
    // int_0^T t J0(t)^2 dt = (T^2/2)(J0^2 + J1^2), the integral reduces to
    // (T^2/4)(J0^2 + 2 J1^2 - J0 J2) - (1 - J0^2)/2 at T = pi gamma.
    if (gamma <= 0.0) return 1.0;
    const double T = kPi * gamma;
    const double j0 = bessel_j0(T);
    const double j1 = bessel_j1(T);
    const double j2 = bessel_jn(2, T);
    const double integral = 0.25 * T * T * (j0 * j0 + 2.0 * j1 * j1 - j0 * j2) - 0.5 * (1.0 - j0 * j0);
    return 1.0 - integral;
}

double conditioning_F_root() {
    double lo = 1.0, hi = 2.0;
    double flo = conditioning_F(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = conditioning_F(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-12) break;
    }
    return 0.5 * (lo + hi);
}

LambdaMinBounds lambda_min_bound(double gamma, int P) {
    if (P < 1) throw std::domain_error("lambda_min_bound: P must be positive");
    LambdaMinBounds b;
    const double pi4 = kPi * kPi * kPi * kPi;
    b.theorem_bound = conditioning_F(gamma) - pi4 / 144.0 * gamma * gamma * gamma * gamma / (double)P;
    b.conjecture_bound = 180.0 * std::exp(-5.8 * gamma);
    return b;
}

std::pair<double, double> symmetric_eigen_range(const Eigen::MatrixXd& A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev(0), ev(ev.size() - 1)};
}

} // namespace sbd
