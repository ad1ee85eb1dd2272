#include "gimcf/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Dense>

#include "gimcf/interp.hpp"
#include "gimcf/quadrature.hpp"

namespace gimcf {

namespace {

bool is_conformal_case(int n, double p) { return std::abs(p - double(n)) < 1e-12; }

void check_mu_args(int n, double p, double r) {
  if (n < 2) throw std::invalid_argument("mu: dimension must be >= 2");
  if (!(p > 1) || p > double(n) + 1e-12) {
    throw std::invalid_argument("mu: need 1 < p <= n");
  }
  if (!(r > 0)) throw std::invalid_argument("mu: need r > 0");
}

double integrand_exponent(double p) { return -1.0 / (p - 1.0); }

// Geodesic sphere area without the strict interior range check; kernel
// endpoints may sit exactly on R0 = r_max.
double vh(const ModelManifold& M, double r) {
  return M.unit_sphere_area() * std::pow(M.warp(r), M.dim() - 1);
}

}  // namespace

double mu(int n, double p, double r) {
  check_mu_args(n, p, r);
  double omega = unit_sphere_area(n);
  if (is_conformal_case(n, p)) {
    return std::pow(omega, -1.0 / (n - 1.0)) * (-std::log(r));
  }
  double a = (n - p) / (p - 1.0);
  return std::pow(omega, -1.0 / (p - 1.0)) * ((p - 1.0) / (n - p)) *
         std::pow(r, -a);
}

double mu_deriv(int n, double p, double r) {
  check_mu_args(n, p, r);
  double omega = unit_sphere_area(n);
  if (is_conformal_case(n, p)) {
    return -std::pow(omega, -1.0 / (n - 1.0)) / r;
  }
  return -std::pow(omega, -1.0 / (p - 1.0)) *
         std::pow(r, -(n - p) / (p - 1.0) - 1.0);
}

double mu_second(int n, double p, double r) {
  check_mu_args(n, p, r);
  if (is_conformal_case(n, p)) {
    throw std::invalid_argument("mu_second: defined for p < n only");
  }
  double a = (n - p) / (p - 1.0);
  return a * (a + 1.0) * mu(n, p, r) / (r * r);
}

// ---------------------------------------------------------------------------

double RadialKernel::deriv(double r) const {
  if (!(r > 0) || !(r <= std::min(M_.r_max(), R0_))) {
    throw std::domain_error("kernel derivative: radius out of domain");
  }
  return -std::pow(vh(M_, r), integrand_exponent(p_));
}

double RadialKernel::second_deriv(double r) const {
  if (!(r > 0) || !(r <= std::min(M_.r_max(), R0_))) {
    throw std::domain_error("kernel second derivative: radius out of domain");
  }
  double v = vh(M_, r);
  double dv = (M_.dim() - 1) * M_.unit_sphere_area() *
              std::pow(M_.warp(r), M_.dim() - 2) * M_.warp_deriv(r);
  return (dv / v) * std::pow(v, integrand_exponent(p_)) / (p_ - 1.0);
}

double RadialKernel::value(double r) const {
  if (parabolic_) throw std::logic_error("kernel value: parabolic model");
  if (!(r > 0)) throw std::domain_error("kernel value: need r > 0");
  if (R0_ != kInf) {
    if (r > R0_) {
      throw std::domain_error("kernel value: radius beyond the Dirichlet radius");
    }
    if (r == R0_) return 0.0;
  }
  auto f = [&](double s) { return std::pow(vh(M_, s), integrand_exponent(p_)); };
  // Integrate up to the nearest stored sample and reuse its value.
  if (!samples_.empty() && r <= samples_.back().r) {
    auto it = std::lower_bound(
        samples_.begin(), samples_.end(), r,
        [](const KernelSample& a, double x) { return a.r < x; });
    if (it->r == r) return it->G;
    return it->G + integrate_split(f, r, it->r, M_.quadrature_tol(),
                                   M_.smoothness_breaks());
  }
  if (R0_ == kInf) {
    return integrate_to_infinity_split(f, r, M_.quadrature_tol(),
                                       M_.smoothness_breaks());
  }
  return integrate_split(f, r, R0_, M_.quadrature_tol(), M_.smoothness_breaks());
}

double RadialKernel::invert_level(double level) const {
  if (parabolic_ || samples_.empty()) {
    throw std::logic_error("invert_level: kernel has no samples");
  }
  double gmax = samples_.front().G, gmin = samples_.back().G;
  if (!(level > gmin) || !(level < gmax)) {
    throw std::domain_error("invert_level: level outside the sampled range");
  }
  // Bracket on the sample grid (G strictly decreasing in r).
  std::size_t lo = 0, hi = samples_.size() - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (samples_[mid].G > level) lo = mid; else hi = mid;
  }
  // Monotone cubic seed through a window of samples, in (G -> r) form.
  std::size_t w0 = lo >= 1 ? lo - 1 : lo, w1 = std::min(hi + 1, samples_.size() - 1);
  std::vector<double> gx, ry;
  for (std::size_t i = w1 + 1; i-- > w0;) {  // ascending in G
    gx.push_back(samples_[i].G);
    ry.push_back(samples_[i].r);
  }
  double seed = samples_[lo].r;
  if (gx.size() >= 2 && gx.back() > gx.front()) {
    auto sl = pchip_slopes(gx, ry);
    seed = hermite_eval(gx, ry, sl, level);
  }
  double a = samples_[lo].r, b = samples_[hi].r;
  seed = std::clamp(seed, a, b);
  // Safeguarded Newton on value(r) - level; G' is known in closed form.
  double x = seed;
  for (int it = 0; it < 100; ++it) {
    double fx = value(x) - level;
    if (fx > 0) a = x; else b = x;  // f decreasing in r? G decreasing: f(a)>0
    double step = fx / deriv(x);
    double xn = x - step;
    if (!(xn > a) || !(xn < b)) xn = 0.5 * (a + b);
    if (std::abs(xn - x) <= 1e-14 * x) { x = xn; break; }
    x = xn;
  }
  return x;
}

void RadialKernel::write_csv(std::ostream& os) const {
  os << "# kernel n=" << M_.dim() << " p=" << p_ << " model=" << M_.id()
     << " R0=" << (R0_ == kInf ? std::string("inf") : std::to_string(R0_))
     << (parabolic_ ? " parabolic=1" : "") << "\n";
  os << "r,G,dG,w_p,mu\n";
  char buf[256];
  for (const auto& s : samples_) {
    double w = (1.0 - p_) * std::log(s.G);
    double m = mu(M_.dim(), p_, s.r);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.r, s.G,
                  s.dG, w, m);
    os << buf;
  }
}

RadialKernel green_radial(const ModelManifold& M, double p, double R0,
                          int pts_per_decade) {
  if (!(p > 1) || p > double(M.dim()) + 1e-12) {
    throw std::invalid_argument("green_radial: need 1 < p <= n");
  }
  if (pts_per_decade < 4) {
    throw std::invalid_argument("green_radial: grid too coarse");
  }
  RadialKernel K(M, p, R0);
  double r_hi;
  if (R0 == kInf) {
    if (M.r_max() != kInf) {
      throw std::invalid_argument(
          "green_radial: R0 = inf on a model with bounded domain");
    }
    if (!M.green_tail_converges(p)) {
      K.parabolic_ = true;  // p-parabolic: no positive minimal kernel
      return K;
    }
    r_hi = 1e3;
  } else {
    if (!(R0 > 0) || R0 > M.r_max()) {
      throw std::invalid_argument("green_radial: R0 out of domain");
    }
    r_hi = R0;
  }
  double r_lo = 1e-7 * r_hi;
  int npts = int(std::ceil(pts_per_decade * std::log10(r_hi / r_lo))) + 1;
  std::vector<double> grid(npts);
  for (int i = 0; i < npts; ++i) {
    double t = double(i) / (npts - 1);
    grid[i] = r_lo * std::pow(r_hi / r_lo, t);
  }
  grid.back() = r_hi;
  auto f = [&](double s) {
    return std::pow(vh(M, s), integrand_exponent(p));
  };
  // Accumulate from the top: tail value first, then per-interval increments.
  std::vector<double> G(npts);
  if (R0 == kInf) {
    G[npts - 1] = integrate_to_infinity_split(f, r_hi, M.quadrature_tol(),
                                              M.smoothness_breaks());
  } else {
    G[npts - 1] = 0.0;
  }
  for (int i = npts - 2; i >= 0; --i) {
    G[i] = G[i + 1] + integrate_split(f, grid[i], grid[i + 1],
                                      M.quadrature_tol(), M.smoothness_breaks());
  }
  K.samples_.resize(npts);
  for (int i = 0; i < npts; ++i) {
    double dG = -std::pow(vh(M, grid[i]), integrand_exponent(p));
    K.samples_[i] = {grid[i], G[i], dG};
  }
  return K;
}

double moser_core(const ModelManifold& M, double p, double r, double R0) {
  if (!(p > 1) || p > double(M.dim()) + 1e-12) {
    throw std::invalid_argument("moser_core: need 1 < p <= n");
  }
  if (!(r > 0) || !(r < std::min(M.r_max(), R0))) {
    throw std::domain_error("moser_core: radius out of (0, min(r_max, R0))");
  }
  auto f = [&](double s) {
    return std::pow(vh(M, s), integrand_exponent(p));
  };
  double G;
  if (R0 == kInf) {
    if (M.r_max() != kInf) {
      throw std::invalid_argument("moser_core: R0 = inf on a bounded domain");
    }
    if (!M.green_tail_converges(p)) {
      throw std::domain_error("moser_core: model is p-parabolic, kernel absent");
    }
    G = integrate_to_infinity_split(f, r, M.quadrature_tol(),
                                    M.smoothness_breaks());
  } else {
    G = integrate_split(f, r, R0, M.quadrature_tol(), M.smoothness_breaks());
  }
  return (1.0 - p) * std::log(G);
}

double core_limit(const ModelManifold& M, double r, double R0) {
  if (!(r > 0) || !(r < std::min(M.r_max(), R0))) {
    throw std::domain_error("core_limit: radius out of domain");
  }
  double hi = std::min(M.r_max(), R0);
  if (!M.nondecreasing_on(r, hi)) {
    throw std::domain_error(
        "core_limit: warping decreases beyond r, so the p->1 limit is not "
        "attained at r");
  }
  return std::log(sphere_area(M, r));
}

double core_limit_extrapolated(const ModelManifold& M, double r,
                               std::span<const double> ps, double R0) {
  const int m = int(ps.size());
  if (m < 2) throw std::invalid_argument("extrapolation needs >= 2 exponents");
  Eigen::MatrixXd A(m, m);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    double x = ps[i] - 1.0;
    if (!(x > 0)) throw std::invalid_argument("exponents must exceed 1");
    A(i, 0) = 1.0;
    A(i, 1) = x * std::log(x);
    for (int j = 2; j < m; ++j) A(i, j) = std::pow(x, j - 1);
    y(i) = moser_core(M, ps[i], r, R0);
  }
  Eigen::VectorXd c = A.fullPivLu().solve(y);
  return c(0);
}

PoleAsymptotics check_pole_asymptotics(const RadialKernel& K,
                                       std::span<const double> r_grid) {
  if (K.parabolic()) throw std::logic_error("pole asymptotics: parabolic kernel");
  double cap = std::min(0.1, (K.outer_radius() == kInf ? kInf : K.outer_radius() / 10));
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > 0) || !(r_grid[i] < cap)) {
      throw std::invalid_argument(
          "pole asymptotics: grid must sit inside (0, min(0.1, R0/10))");
    }
    if (i && !(r_grid[i] > r_grid[i - 1])) {
      throw std::invalid_argument("pole asymptotics: grid must be increasing");
    }
  }
  if (r_grid.empty()) throw std::invalid_argument("pole asymptotics: empty grid");
  int n = K.model().dim();
  double p = K.p();
  PoleAsymptotics out{0, 0, 0, !is_conformal_case(n, p)};
  for (double r : r_grid) {
    out.res_value = std::max(out.res_value,
                             std::abs(K.value(r) / mu(n, p, r) - 1.0));
    out.res_gradient = std::max(out.res_gradient,
                                std::abs(K.deriv(r) / mu_deriv(n, p, r) - 1.0));
    if (out.has_hessian) {
      out.res_hessian = std::max(
          out.res_hessian, std::abs(K.second_deriv(r) / mu_second(n, p, r) - 1.0));
    }
  }
  return out;
}

double level_energy(const RadialKernel& K, double s, double t) {
  if (!(s > 0) || !(s <= t)) {
    throw std::invalid_argument("level_energy: need 0 < s <= t");
  }
  if (s == t) return 0.0;
  double r_s = K.invert_level(s), r_t = K.invert_level(t);
  const auto& M = K.model();
  double p = K.p();
  auto f = [&](double r) {
    double v = vh(M, r);
    return std::pow(v, -p / (p - 1.0)) * v;
  };
  return integrate_split(f, r_t, r_s, M.quadrature_tol(),
                         M.smoothness_breaks());
}

double decay_exponent(const ModelManifold& M, double p, double r_lo,
                      double r_hi, int npts) {
  double b = M.volume_growth_exponent();
  if (!(p > 1) || !(p < b)) {
    throw std::invalid_argument(
        "decay_exponent: need 1 < p < b (kernel parabolic or borderline)");
  }
  if (!(0 < r_lo) || !(r_lo < r_hi)) {
    throw std::invalid_argument("decay_exponent: bad window");
  }
  if (npts < 8) throw std::invalid_argument("decay_exponent: too few points");
  auto f = [&](double s) {
    return std::pow(vh(M, s), integrand_exponent(p));
  };
  std::vector<double> lx(npts), ly(npts);
  double G = integrate_to_infinity_split(f, r_hi, M.quadrature_tol(),
                                         M.smoothness_breaks());
  for (int i = npts - 1; i >= 0; --i) {
    double t = double(i) / (npts - 1);
    double r = r_lo * std::pow(r_hi / r_lo, t);
    if (i < npts - 1) {
      double r_next = r_lo * std::pow(r_hi / r_lo, double(i + 1) / (npts - 1));
      G += integrate_split(f, r, r_next, M.quadrature_tol(),
                           M.smoothness_breaks());
    }
    lx[i] = std::log(r);
    ly[i] = std::log(G);
  }
  return lsq_slope(lx, ly);
}

}  // namespace gimcf
