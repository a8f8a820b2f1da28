#include "sbd/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace sbd {

namespace {

constexpr long double kPiL = 3.141592653589793238462643383279502884L;
constexpr long double kEulerGammaL = 0.577215664901532860606512090082402431L;

// The alternating power series loses ~log10(I0(r)) digits to cancellation.
// long double carries it to r = 12, __float128 to r = 16; the Hankel
// expansion's optimal-truncation floor drops below 1e-14 from r = 16 on.
constexpr double kSeamLongDouble = 12.0;
constexpr double kSeamFloat128 = 16.0;

template <typename T>
T tabs(T v) {
    return v < T(0) ? -v : v;
}

template <typename T>
T j0_series(double x) {
    const T q = T(x) * T(0.5) * T(x) * T(0.5);
    T term = T(1);
    T sum = T(1);
    for (int m = 1; m < 256; ++m) {
        term *= -q / (T(m) * T(m));
        sum += term;
        if (tabs(term) < T(1e-38) && m > x) break;
    }
    return sum;
}

template <typename T>
T j1_series(double x) {
    const T q = T(x) * T(0.5) * T(x) * T(0.5);
    T term = T(x) * T(0.5);
    T sum = term;
    for (int m = 1; m < 256; ++m) {
        term *= -q / (T(m) * T(m + 1));
        sum += term;
        if (tabs(term) < T(1e-38) && m > x) break;
    }
    return sum;
}

// S0 = sum_{m>=1} (-1)^{m+1} H_m q^m / (m!)^2, the series part of Y0.
template <typename T>
T y0_series_part(double x) {
    const T q = T(x) * T(0.5) * T(x) * T(0.5);
    T fact_term = T(1); // q^m / (m!)^2, built incrementally
    T harmonic = T(0);
    T sum = T(0);
    int sign = 1;
    for (int m = 1; m < 256; ++m) {
        fact_term *= q / (T(m) * T(m));
        harmonic += T(1) / T(m);
        const T term = T(sign) * harmonic * fact_term;
        sum += term;
        sign = -sign;
        if (tabs(term) < T(1e-38) && m > x) break;
    }
    return sum;
}

// S1 = sum_{k>=0} (-1)^k (H_k + H_{k+1}) (x/2)^{2k+1} / (k! (k+1)!),
// so that Y1 = (2/pi)(ln(x/2) + gamma) J1 - 2/(pi x) - S1/pi.
template <typename T>
T y1_series_part(double x) {
    const T q = T(x) * T(0.5) * T(x) * T(0.5);
    T fact_term = T(x) * T(0.5); // (x/2)^{2k+1}/(k!(k+1)!)
    T hk = T(0);                 // H_k
    T hk1 = T(1);                // H_{k+1}
    T sum = fact_term * (hk + hk1);
    int sign = -1;
    for (int k = 1; k < 256; ++k) {
        fact_term *= q / (T(k) * T(k + 1));
        hk += T(1) / T(k);
        hk1 += T(1) / T(k + 1);
        const T term = T(sign) * (hk + hk1) * fact_term;
        sum += term;
        sign = -sign;
        if (tabs(term) < T(1e-38) && k > x) break;
    }
    return sum;
}

// Asymptotic amplitude/phase series P, Q for order nu (A&S 9.2.9/9.2.10),
// truncated at the smallest term.
void hankel_pq(int nu, long double x, long double& P, long double& Q) {
    const long double mu = 4.0L * nu * nu;
    long double s = 1.0L; // a_k / x^k
    P = 1.0L;
    Q = 0.0L;
    long double prev = 1.0L;
    for (int k = 1; k < 40; ++k) {
        const long double odd = 2.0L * k - 1.0L;
        s *= (mu - odd * odd) / (8.0L * k * x);
        if (tabs(s) >= prev) break; // divergent tail reached
        prev = tabs(s);
        switch (k & 3) {
            case 0: P += s; break;
            case 1: Q += s; break;
            case 2: P -= s; break;
            case 3: Q -= s; break;
        }
        if (prev < 1e-20L) break;
    }
}

enum class Kind { J, Y };

double hankel_eval(Kind kind, int nu, double x) {
    long double P, Q;
    hankel_pq(nu, x, P, Q);
    const long double chi = (long double)x - (0.5L * nu + 0.25L) * kPiL;
    const long double amp = sqrtl(2.0L / (kPiL * (long double)x));
    const long double c = cosl(chi);
    const long double s = sinl(chi);
    if (kind == Kind::J) return (double)(amp * (P * c - Q * s));
    return (double)(amp * (P * s + Q * c));
}

} // namespace

double bessel_j0(double r) {
    r = std::fabs(r); // J0 is even
    if (r < kSeamLongDouble) return (double)j0_series<long double>(r);
    if (r < kSeamFloat128) return (double)j0_series<__float128>(r);
    return hankel_eval(Kind::J, 0, r);
}

double bessel_j1(double r) {
    const double sign = r < 0 ? -1.0 : 1.0; // J1 is odd
    r = std::fabs(r);
    if (r < kSeamLongDouble) return sign * (double)j1_series<long double>(r);
    if (r < kSeamFloat128) return sign * (double)j1_series<__float128>(r);
    return sign * hankel_eval(Kind::J, 1, r);
}

double bessel_y0(double r) {
    if (!(r > 0.0)) throw std::domain_error("bessel_y0: argument must be positive");
    if (r >= kSeamFloat128) return hankel_eval(Kind::Y, 0, r);
    const long double lg = logl((long double)r * 0.5L) + kEulerGammaL;
    const long double j0 = (long double)bessel_j0(r);
    long double s;
    if (r < kSeamLongDouble)
        s = y0_series_part<long double>(r);
    else
        s = (long double)y0_series_part<__float128>(r);
    return (double)((2.0L / kPiL) * (lg * j0 + s));
}

double bessel_y1(double r) {
    if (!(r > 0.0)) throw std::domain_error("bessel_y1: argument must be positive");
    if (r >= kSeamFloat128) return hankel_eval(Kind::Y, 1, r);
    const long double lg = logl((long double)r * 0.5L) + kEulerGammaL;
    const long double j1 = (long double)bessel_j1(r);
    long double s;
    if (r < kSeamLongDouble)
        s = y1_series_part<long double>(r);
    else
        s = (long double)y1_series_part<__float128>(r);
    return (double)((2.0L / kPiL) * lg * j1 - 2.0L / (kPiL * (long double)r) - s / kPiL);
}

double bessel_jn(int n, double r) {
    if (n == 0) return bessel_j0(r);
    if (n == 1) return bessel_j1(r);
    if (r == 0.0) return 0.0;

    if ((double)n < r) {
        // Forward recurrence, stable while the order stays below the argument.
        double jm1 = bessel_j0(r);
        double j = bessel_j1(r);
        for (int k = 1; k < n; ++k) {
            const double jp1 = (2.0 * k / r) * j - jm1;
            jm1 = j;
            j = jp1;
        }
        return j;
    }

    // Miller's algorithm: unnormalized downward recurrence from above n,
    // normalized with J0 + 2*sum_m J_{2m} = 1.
    const int start = n + (int)std::ceil(std::sqrt(40.0 * n)) + 20;
    long double fp1 = 0.0L;
    long double f = 1e-300L;
    long double target = 0.0L;
    long double norm = 0.0L;
    for (int k = start; k >= 1; --k) {
        const long double fm1 = (2.0L * k / (long double)r) * f - fp1;
        fp1 = f;
        f = fm1;
        if (k - 1 == n) target = f;
        if (((k - 1) & 1) == 0) norm += (k - 1 == 0) ? f : 2.0L * f;
        if (tabs(f) > 1e260L) { // rescale to avoid overflow
            f *= 1e-260L;
            fp1 *= 1e-260L;
            target *= 1e-260L;
            norm *= 1e-260L;
        }
    }
    return (double)(target / norm);
}

double bessel_j(int order, double r) {
    if (order < 0) throw std::domain_error("bessel_j: order must be nonnegative");
    if (r < 0.0) throw std::domain_error("bessel_j: argument must be nonnegative");
    return bessel_jn(order, r);
}

double bessel_i0(double r) {
    r = std::fabs(r);
    const double q = 0.25 * r * r;
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m < 128; ++m) {
        term *= q / ((double)m * (double)m);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

} // namespace sbd
