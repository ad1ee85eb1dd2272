#pragma once

#include <functional>
#include <span>

namespace gimcf {

// Adaptive 1D quadrature on [a, b] to a relative tolerance. Endpoint
// singularities that are integrable are handled. Throws std::runtime_error
// when the error estimate cannot be brought below the tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol);

// Improper integral over [a, inf). The integrand is mapped to (0,1] via
// s = a/u before integration; convergence must be established by the caller
// (tail-exponent test), this routine only evaluates.
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double rel_tol);

// Same, but split at interior points where the integrand is only C^1
// (quadrature converges per smooth piece).
double integrate_split(const std::function<double(double)>& f, double a,
                       double b, double rel_tol, std::span<const double> breaks);
double integrate_to_infinity_split(const std::function<double(double)>& f,
                                   double a, double rel_tol,
                                   std::span<const double> breaks);

}  // namespace gimcf
