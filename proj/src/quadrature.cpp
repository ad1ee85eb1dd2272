#include "gimcf/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gimcf {

namespace {
boost::math::quadrature::tanh_sinh<double>& integrator() {
  thread_local boost::math::quadrature::tanh_sinh<double> ts(15);
  return ts;
}
}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw std::invalid_argument("integrate: empty interval, a > b");
  }
  double tol = std::clamp(rel_tol, 1e-14, 1e-3);
  double err = 0, l1 = 0;
  std::size_t levels = 0;
  double val = integrator().integrate(f, a, b, tol, &err, &l1, &levels);
  // The error estimate is very conservative on short intervals; only genuine
  // blowups (non-integrable singularities) keep err comparable to the L1 mass.
  if (!std::isfinite(val) || (l1 > 0 && err > 1e-3 * l1 + 1e-300)) {
    throw std::runtime_error("integrate: quadrature did not converge");
  }
  return val;
}

double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double rel_tol) {
  if (!(a > 0)) {
    throw std::invalid_argument("integrate_to_infinity: need a > 0");
  }
  // s = a/u maps u in (0,1] onto s in [a,inf); ds = -(a/u^2) du.
  auto g = [&](double u) { return f(a / u) * a / (u * u); };
  return integrate(g, 0.0, 1.0, rel_tol);
}

double integrate_split(const std::function<double(double)>& f, double a,
                       double b, double rel_tol,
                       std::span<const double> breaks) {
  double total = 0, lo = a;
  for (double c : breaks) {  // breaks are sorted ascending
    if (c <= lo || c >= b) continue;
    total += integrate(f, lo, c, rel_tol);
    lo = c;
  }
  return total + integrate(f, lo, b, rel_tol);
}

double integrate_to_infinity_split(const std::function<double(double)>& f,
                                   double a, double rel_tol,
                                   std::span<const double> breaks) {
  double total = 0, lo = a;
  for (double c : breaks) {
    if (c <= lo) continue;
    total += integrate(f, lo, c, rel_tol);
    lo = c;
  }
  return total + integrate_to_infinity(f, lo, rel_tol);
}

}  // namespace gimcf
