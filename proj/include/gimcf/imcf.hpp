#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gimcf/model.hpp"

namespace gimcf {

// Radial comparison function with its derivative; the smooth level-set
// identity div(grad u / |grad u|) = H(r) for radial u with u' > 0 turns
// sub/supersolution checks into pointwise margins.
struct RadialProfile {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
};

// Exact flow core on a model: u(r) = (n-1) log h(r); satisfies H - u' = 0.
double imcf_core_model(const ModelManifold& M, double r);
RadialProfile exact_core_profile(const ModelManifold& M);

// (n-1) log r - r : strict subsolution near the pole when the sphere mean
// curvature stays within 1 of (n-1)/r.
RadialProfile barrier_below(int n);
// (n-1) log r + r + 1/(1 - r/rho0) - 1 : the matching supersolution.
RadialProfile barrier_above(int n, double rho0);

struct MarginReport {
  std::vector<double> r, lhs, rhs, margin;
  double min_margin, max_margin;
};

// lhs = |grad u| = (n-1) h'/h, rhs = (n-1) e^{-u/(n-1)} = (n-1)/h for the
// exact core; margin = rhs - lhs is >= 0 exactly when h' <= 1 on the grid.
MarginReport gradient_bound_check(const ModelManifold& M,
                                  std::span<const double> r_grid);

// margin(r) = H(r) - u'(r); positive means strict subsolution, negative
// strict supersolution. Throws where u' <= 0.
MarginReport subsolution_margin(const ModelManifold& M, const RadialProfile& u,
                                std::span<const double> r_grid);

struct PSupersolutionReport {
  MarginReport margins;  // lhs = (p-1)w'' + H w', rhs = (w')^2
  // radii where |H - (n-1)/r| <= 1 fails (the estimate's curvature hypothesis)
  std::vector<double> hypothesis_violations;
};

// Margin of w = (n-p) log r + 1/(1-Cr) against the transformed flow
// equation: (p-1) w'' + H w' - (w')^2, nonpositive for admissible C.
PSupersolutionReport p_supersolution_margin(const ModelManifold& M, double p,
                                            double C,
                                            std::span<const double> r_grid);

// Smallest integer C in [1, c_max] making the margin nonpositive on
// (r_lo, 1/(2C)); throws when none is admissible.
int find_supersolution_C(const ModelManifold& M, double p, double r_lo = 1e-8,
                         int grid_pts = 200, int c_max = 1 << 20);

enum class GrowthFlavor { Isoperimetric, ReverseDoubling };

// sup over the grid of ((n-1) or (b-1)) log r - u(r), after certifying the
// flavor's hypothesis on the grid (stable c_I, resp. stable doubling with
// b > 1). The hypotheses fail on exponential-volume models.
double growth_gap(const ModelManifold& M, GrowthFlavor flavor,
                  std::span<const double> r_grid);

// 1 + c_I^{-n/(n-1)} n (2 omega_{n-1})^{1/(n-1)} (1+e^{n-1})/(1-e^{-1})
double c1_constant(int n, double c_I);

// e^{-t/(n-1)} r_t with u(r_t) = t for the exact core; identically 1 on
// euclidean models.
double diameter_ratio(const ModelManifold& M, double t);

}  // namespace gimcf
