#pragma once

namespace sbd {

// Bessel functions of the first kind, order 0 and 1.
// Power series below the seam (long double, then __float128 on [12, 16) where
// the alternating series loses digits in double), Hankel asymptotic expansion
// above. Accurate to ~1e-13 relative (absolute near zeros) for r <= 1e4.
double bessel_j0(double r);
double bessel_j1(double r);

// J_n for integer n >= 0. Forward recurrence where stable (n < r), Miller's
// normalized downward recurrence otherwise.
double bessel_jn(int n, double r);

// Dispatch on order; throws std::domain_error for r < 0 or n < 0.
double bessel_j(int order, double r);

// Bessel functions of the second kind, order 0 and 1. r must be positive
// (logarithmic singularity at the origin); throws std::domain_error otherwise.
double bessel_y0(double r);
double bessel_y1(double r);

// Modified Bessel function I_0 (power series; all terms positive, no
// cancellation). Used by the NUFFT spreading window.
double bessel_i0(double r);

} // namespace sbd
