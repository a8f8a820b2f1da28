#include "sbd/bessel_roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sbd/bessel.hpp"

namespace sbd {

namespace {

constexpr double kPi = std::numbers::pi;

// Newton iteration bracketed by [lo, hi]; falls back to bisection whenever a
// step leaves the bracket. f must change sign across the bracket.
template <typename F, typename DF>
double bracketed_newton(F f, DF df, double lo, double hi) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) throw std::runtime_error("bracketed_newton: no sign change");
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0) == (flo > 0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        const double d = df(x);
        double xn = x - fx / d;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) < 1e-16 * (1.0 + std::fabs(x))) return xn;
        x = xn;
    }
    return x;
}

} // namespace

std::vector<double> dirichlet_roots(int P) {
    if (P < 1) throw std::domain_error("dirichlet_roots: P must be positive");
    std::vector<double> roots;
    roots.reserve(P);
    for (int p = 1; p <= P; ++p) {
        double lo = kPi * (p - 0.25);
        double hi = kPi * (p - 0.125);
        // The analytic bracket is tight; pad a hair against rounding at the ends.
        lo -= 1e-12 * lo;
        hi += 1e-12 * hi;
        const double r = bracketed_newton(
            [](double x) { return bessel_j0(x); },
            [](double x) { return -bessel_j1(x); }, lo, hi);
        roots.push_back(r);
    }
    return roots;
}

std::vector<double> robin_roots(double H, int P) {
    if (H < 0.0) throw std::domain_error("robin_roots: H must be nonnegative");
    if (P < 1) throw std::domain_error("robin_roots: P must be positive");
    // f(r) = r J0'(r) + H J0(r) = H J0(r) - r J1(r);  f'(r) = -H J1(r) - r J0(r).
    const auto f = [H](double r) { return H * bessel_j0(r) - r * bessel_j1(r); };
    const auto df = [H](double r) { return -H * bessel_j1(r) - r * bessel_j0(r); };

    std::vector<double> roots;
    roots.reserve(P);
    const double step = kPi / 16.0;
    double lo = step * 1e-6; // skip the trivial r = 0 zero of r J1(r)
    double flo = f(lo);
    double r = lo + step;
    while ((int)roots.size() < P) {
        const double fr = f(r);
        if (fr == 0.0) {
            roots.push_back(r);
        } else if ((fr > 0) != (flo > 0)) {
            roots.push_back(bracketed_newton(f, df, lo, r));
        }
        lo = r;
        flo = fr;
        r += step;
    }
    return roots;
}

double j1_root(int k) {
    if (k < 1) throw std::domain_error("j1_root: k must be positive");
    // McMahon: j_{1,k} ~ b - 3/(8b) with b = (k + 1/4) pi.
    const double b = (k + 0.25) * kPi;
    const double guess = b - 3.0 / (8.0 * b);
    const double lo = guess - 0.5;
    const double hi = guess + 0.5;
    return bracketed_newton(
        [](double x) { return bessel_j1(x); },
        [](double x) { return bessel_j0(x) - bessel_j1(x) / x; }, std::max(lo, 0.5), hi);
}

std::vector<double> j1_roots_near(double omega, int count) {
    if (count < 1) throw std::domain_error("j1_roots_near: count must be positive");
    int k0 = (int)std::lround(omega / kPi - 0.25);
    k0 = std::max(k0, 1);
    const int span = count + 4;
    std::vector<double> cand;
    for (int k = std::max(1, k0 - span); k <= k0 + span; ++k) cand.push_back(j1_root(k));
    std::sort(cand.begin(), cand.end(), [omega](double a, double b) {
        return std::fabs(a - omega) < std::fabs(b - omega) ||
               (std::fabs(a - omega) == std::fabs(b - omega) && a < b);
    });
    cand.resize(count);
    return cand;
}

double first_y0_root() {
    static const double root = bracketed_newton(
        [](double x) { return bessel_y0(x); },
        [](double x) { return -bessel_y1(x); }, 0.5, 1.5);
    return root;
}

double y0_root_above(double k) {
    if (!(k > 0.0)) throw std::domain_error("y0_root_above: k must be positive");
    const auto f = [](double x) { return bessel_y0(x); };
    const auto df = [](double x) { return -bessel_y1(x); };
    const double first = first_y0_root();
    if (k <= first) return first;
    // Scan upward in quarter-period steps until Y0 changes sign.
    double lo = k;
    double flo = f(lo);
    if (flo == 0.0) return lo;
    const double step = kPi / 4.0;
    for (int it = 0; it < 10000; ++it) {
        const double hi = lo + step;
        const double fhi = f(hi);
        if (fhi == 0.0) return hi;
        if ((fhi > 0) != (flo > 0)) {
            const double r = bracketed_newton(f, df, lo, hi);
            // Guard against landing epsilon-below k through rounding.
            return std::max(r, k);
        }
        lo = hi;
        flo = fhi;
    }
    throw std::runtime_error("y0_root_above: scan failed");
}

} // namespace sbd
