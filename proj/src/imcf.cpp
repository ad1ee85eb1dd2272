#include "gimcf/imcf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gimcf {

double imcf_core_model(const ModelManifold& M, double r) {
  if (!(r > 0) || !(r < M.r_max())) {
    throw std::domain_error("imcf_core_model: radius out of domain");
  }
  if (!M.nondecreasing_on(r, std::min(M.r_max(), kInf))) {
    throw std::domain_error("imcf_core_model: warping must be non-decreasing");
  }
  return (M.dim() - 1) * std::log(M.warp(r));
}

RadialProfile exact_core_profile(const ModelManifold& M) {
  int n = M.dim();
  return {
      [&M, n](double r) { return (n - 1) * std::log(M.warp(r)); },
      [&M, n](double r) { return (n - 1) * M.warp_deriv(r) / M.warp(r); },
  };
}

RadialProfile barrier_below(int n) {
  return {
      [n](double r) { return (n - 1) * std::log(r) - r; },
      [n](double r) { return (n - 1) / r - 1.0; },
  };
}

RadialProfile barrier_above(int n, double rho0) {
  if (!(rho0 > 0)) throw std::invalid_argument("barrier_above: rho0 must be > 0");
  return {
      [n, rho0](double r) {
        return (n - 1) * std::log(r) + r + 1.0 / (1.0 - r / rho0) - 1.0;
      },
      [n, rho0](double r) {
        double d = 1.0 - r / rho0;
        return (n - 1) / r + 1.0 + 1.0 / (rho0 * d * d);
      },
  };
}

namespace {
void check_grid(const ModelManifold& M, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("margin check: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0) || !(grid[i] < M.r_max())) {
      throw std::domain_error("margin check: grid point out of domain");
    }
    if (i && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("margin check: grid must be increasing");
    }
  }
}

void finalize(MarginReport& rep) {
  rep.min_margin = kInf;
  rep.max_margin = -kInf;
  for (double m : rep.margin) {
    rep.min_margin = std::min(rep.min_margin, m);
    rep.max_margin = std::max(rep.max_margin, m);
  }
}
}  // namespace

MarginReport gradient_bound_check(const ModelManifold& M,
                                  std::span<const double> r_grid) {
  check_grid(M, r_grid);
  const int n = M.dim();
  MarginReport rep;
  for (double r : r_grid) {
    double h = M.warp(r), dh = M.warp_deriv(r);
    double lhs = (n - 1) * dh / h;  // |grad u| of the exact core
    double rhs = (n - 1) / h;       // (n-1) e^{-u/(n-1)}
    rep.r.push_back(r);
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.margin.push_back(rhs - lhs);
  }
  finalize(rep);
  return rep;
}

MarginReport subsolution_margin(const ModelManifold& M, const RadialProfile& u,
                                std::span<const double> r_grid) {
  check_grid(M, r_grid);
  MarginReport rep;
  for (double r : r_grid) {
    double up = u.deriv(r);
    if (!(up > 0)) {
      throw std::domain_error(
          "subsolution_margin: u' <= 0 at r = " + std::to_string(r) +
          "; the smooth radial level-set form needs u' > 0");
    }
    double H = mean_curvature_sphere(M, r);
    rep.r.push_back(r);
    rep.lhs.push_back(H);
    rep.rhs.push_back(up);
    rep.margin.push_back(H - up);
  }
  finalize(rep);
  return rep;
}

PSupersolutionReport p_supersolution_margin(const ModelManifold& M, double p,
                                            double C,
                                            std::span<const double> r_grid) {
  check_grid(M, r_grid);
  if (!(p > 1) || p > 1.2 + 1e-12) {
    throw std::invalid_argument("p_supersolution_margin: need p in (1, 1.2]");
  }
  if (C < 0) throw std::invalid_argument("p_supersolution_margin: C < 0");
  if (C > 0 && !(C * r_grid.back() < 1)) {
    throw std::invalid_argument(
        "p_supersolution_margin: need C * sup(range) < 1");
  }
  const int n = M.dim();
  const double a = n - p;
  PSupersolutionReport rep;
  for (double r : r_grid) {
    double d = 1.0 - C * r;
    double wp = a / r + C / (d * d);
    double wpp = -a / (r * r) + 2 * C * C / (d * d * d);
    double H = mean_curvature_sphere(M, r);
    double lhs = (p - 1) * wpp + H * wp;
    double rhs = wp * wp;
    rep.margins.r.push_back(r);
    rep.margins.lhs.push_back(lhs);
    rep.margins.rhs.push_back(rhs);
    rep.margins.margin.push_back(lhs - rhs);
    if (std::abs(H - (n - 1) / r) > 1.0) rep.hypothesis_violations.push_back(r);
  }
  finalize(rep.margins);
  return rep;
}

int find_supersolution_C(const ModelManifold& M, double p, double r_lo,
                         int grid_pts, int c_max) {
  if (grid_pts < 8) throw std::invalid_argument("find_supersolution_C: grid too small");
  auto admissible = [&](int C) {
    double r_hi = 1.0 / (2.0 * C);
    if (!(r_lo < r_hi) || r_hi >= M.r_max()) return false;
    std::vector<double> grid(grid_pts);
    for (int i = 0; i < grid_pts; ++i) {
      grid[i] = r_lo * std::pow(r_hi / r_lo, double(i) / (grid_pts - 1));
    }
    auto rep = p_supersolution_margin(M, p, double(C), grid);
    return rep.margins.max_margin <= 0.0;
  };
  int hi = 1;
  while (hi <= c_max && !admissible(hi)) hi *= 2;
  if (hi > c_max) {
    throw std::domain_error("find_supersolution_C: no admissible C <= c_max");
  }
  int lo = hi / 2 + 1;  // everything below hi/2+1 unexplored except powers
  if (hi == 1) return 1;
  // Binary search for the smallest admissible integer in [lo, hi].
  while (lo < hi) {
    int mid = lo + (hi - lo) / 2;
    if (admissible(mid)) hi = mid; else lo = mid + 1;
  }
  return hi;
}

namespace {
// Stability certificates: the constant measured on the full grid must match
// the one on its lower half (exponential growth breaks both).
bool certify_isoperimetric(const ModelManifold& M, std::span<const double> g) {
  const double ex = double(M.dim() - 1) / M.dim();
  auto inf_ratio = [&](std::size_t lo, std::size_t hi) {
    double v = kInf;
    for (std::size_t i = lo; i < hi; ++i) {
      v = std::min(v, sphere_area(M, g[i]) / std::pow(ball_volume(M, g[i]), ex));
    }
    return v;
  };
  double half = inf_ratio(0, g.size() / 2), full = inf_ratio(0, g.size());
  return full > 0 && full >= 0.9 * half;
}

bool certify_reverse_doubling(const ModelManifold& M,
                              std::span<const double> g) {
  auto cd = [&](std::size_t lo, std::size_t hi) {
    double v = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      v = std::max(v, ball_volume(M, 2 * g[i]) / ball_volume(M, g[i]));
    }
    return v;
  };
  double half = cd(0, g.size() / 2), full = cd(0, g.size());
  if (!(full <= 1.1 * half)) return false;  // doubling constant drifting
  // least-squares growth exponent must exceed 1
  std::vector<double> lx, ly;
  for (double r : g) {
    lx.push_back(std::log(r));
    ly.push_back(std::log(ball_volume(M, r)));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) { mx += lx[i]; my += ly[i]; }
  mx /= lx.size(); my /= ly.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return sxy / sxx > 1.0;
}
}  // namespace

double growth_gap(const ModelManifold& M, GrowthFlavor flavor,
                  std::span<const double> r_grid) {
  check_grid(M, r_grid);
  if (r_grid.size() < 8) throw std::invalid_argument("growth_gap: need >= 8 radii");
  if (!(2 * r_grid.back() < M.r_max())) {
    throw std::invalid_argument("growth_gap: doubled radii leave the domain");
  }
  double coeff;
  if (flavor == GrowthFlavor::Isoperimetric) {
    if (!certify_isoperimetric(M, r_grid)) {
      throw std::domain_error(
          "growth_gap: isoperimetric ratio not stable on the grid");
    }
    coeff = M.dim() - 1;
  } else {
    if (!certify_reverse_doubling(M, r_grid)) {
      throw std::domain_error(
          "growth_gap: doubling/reverse-doubling not certified on the grid");
    }
    std::vector<double> lx, ly;
    for (double r : r_grid) {
      lx.push_back(std::log(r));
      ly.push_back(std::log(ball_volume(M, r)));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) { mx += lx[i]; my += ly[i]; }
    mx /= lx.size(); my /= ly.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
    }
    coeff = sxy / sxx - 1.0;  // b - 1
  }
  double gap = -kInf;
  for (double r : r_grid) {
    gap = std::max(gap, coeff * std::log(r) - imcf_core_model(M, r));
  }
  return gap;
}

double c1_constant(int n, double c_I) {
  if (n < 2 || !(c_I > 0)) throw std::invalid_argument("c1_constant: bad arguments");
  double omega = unit_sphere_area(n);
  return 1.0 + std::pow(c_I, -double(n) / (n - 1)) * n *
                   std::pow(2.0 * omega, 1.0 / (n - 1)) *
                   (1.0 + std::exp(double(n - 1))) / (1.0 - std::exp(-1.0));
}

double diameter_ratio(const ModelManifold& M, double t) {
  const int n = M.dim();
  // invert u(r) = (n-1) log h(r) = t, i.e. h(r_t) = e^{t/(n-1)}
  double target = std::exp(t / (n - 1));
  double lo = 1e-12 * std::min(1.0, M.r_max());
  double hi = M.r_max() == kInf ? 1.0 : M.r_max() * (1 - 1e-12);
  if (!M.nondecreasing_on(lo, hi)) {
    throw std::domain_error("diameter_ratio: warping must be non-decreasing");
  }
  while (M.r_max() == kInf && M.warp(hi) < target) {
    hi *= 2;
    if (hi > 1e300) throw std::domain_error("diameter_ratio: t out of range");
  }
  if (M.warp(lo) > target || M.warp(hi) < target) {
    throw std::domain_error("diameter_ratio: t outside the range of the core");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (M.warp(mid) < target) lo = mid; else hi = mid;
  }
  double r_t = 0.5 * (lo + hi);
  return std::exp(-t / (n - 1)) * r_t;
}

}  // namespace gimcf
