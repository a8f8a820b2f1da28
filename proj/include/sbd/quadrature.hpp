#pragma once

#include <functional>

namespace sbd {

// Composite 16-point Gauss-Legendre over [a, b] split into n_panels panels.
double gauss_legendre_panels(const std::function<double(double)>& f, double a, double b,
                             int n_panels);

// Panel-doubling Gauss-Legendre: starts at n_panels0 and doubles until two
// successive refinements agree to rel_tol (relative to the integral scale).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int n_panels0 = 8);

} // namespace sbd
