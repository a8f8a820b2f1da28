#include "sbd/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace sbd {

namespace {

struct GL16 {
    std::array<double, 16> x; // nodes on [-1, 1]
    std::array<double, 16> w;
};

// Nodes by Newton iteration on P_16 from the Chebyshev initial guess.
GL16 make_gl16() {
    GL16 g;
    const int n = 16;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        g.x[i] = x;
        g.w[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return g;
}

const GL16& gl16() {
    static const GL16 g = make_gl16();
    return g;
}

} // namespace

double gauss_legendre_panels(const std::function<double(double)>& f, double a, double b,
                             int n_panels) {
    const GL16& g = gl16();
    const double h = (b - a) / n_panels;
    double total = 0.0;
    for (int p = 0; p < n_panels; ++p) {
        const double c = a + (p + 0.5) * h;
        double s = 0.0;
        for (int i = 0; i < 16; ++i) s += g.w[i] * f(c + 0.5 * h * g.x[i]);
        total += 0.5 * h * s;
    }
    return total;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int n_panels0) {
    int n = n_panels0;
    double prev = gauss_legendre_panels(f, a, b, n);
    for (int it = 0; it < 14; ++it) {
        n *= 2;
        const double cur = gauss_legendre_panels(f, a, b, n);
        const double scale = std::max({std::fabs(cur), std::fabs(prev), 1e-300});
        if (std::fabs(cur - prev) <= rel_tol * scale) return cur;
        prev = cur;
    }
    return prev;
}

} // namespace sbd
