#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "gimcf/model.hpp"

namespace gimcf {

// Rotationally symmetric fundamental solution of the p-Laplacian on R^n:
// two-branch closed form, valid for 1 < p <= n (log branch at p = n).
double mu(int n, double p, double r);
double mu_deriv(int n, double p, double r);
double mu_second(int n, double p, double r);  // p < n only

struct KernelSample {
  double r, G, dG;
};

// Radial p-Green kernel G_p(r) = int_r^{R0} v_h(s)^{-1/(p-1)} ds on a model,
// with Dirichlet radius R0 (kInf gives the minimal kernel when the tail
// integral converges). Construct via green_radial.
class RadialKernel {
 public:
  double p() const { return p_; }
  double outer_radius() const { return R0_; }
  const ModelManifold& model() const { return M_; }
  bool parabolic() const { return parabolic_; }
  const std::vector<KernelSample>& samples() const { return samples_; }

  double value(double r) const;
  double deriv(double r) const;        // -v_h(r)^{-1/(p-1)}
  double second_deriv(double r) const; // (v_h'/v_h) v_h^{-1/(p-1)} / (p-1)

  // Radius with G(r) = level. Seeded by monotone cubic interpolation on the
  // samples, then polished against value(). Level must lie inside the
  // sampled range.
  double invert_level(double level) const;

  // Columns r, G, dG, w_p, mu with a comment header naming (n, p, model, R0).
  void write_csv(std::ostream& os) const;

 private:
  friend RadialKernel green_radial(const ModelManifold&, double, double, int);
  RadialKernel(const ModelManifold& M, double p, double R0)
      : M_(M), p_(p), R0_(R0) {}
  ModelManifold M_;
  double p_;
  double R0_;
  bool parabolic_ = false;
  std::vector<KernelSample> samples_;
};

// Builds the sampled kernel on a log-spaced grid (pts_per_decade points per
// decade). A model whose tail integral diverges at R0 = inf comes back with
// the parabolic flag set and no samples.
RadialKernel green_radial(const ModelManifold& M, double p, double R0 = kInf,
                          int pts_per_decade = 64);

// (1-p) log G_p(r); throws on parabolic models and at r >= R0.
double moser_core(const ModelManifold& M, double p, double r, double R0 = kInf);

// p->1 limit of the Moser-transformed kernel: log v_h(r), valid when h is
// non-decreasing beyond r (the sup of 1/v_h over [r, R0] sits at r).
double core_limit(const ModelManifold& M, double r, double R0 = kInf);

// Extrapolates moser_core(p_i) to p = 1. The error in (p-1) carries an
// x log x term from the Laplace tail of the kernel integral, so the fit
// basis is {1, x log x, x, x^2, ...} rather than pure powers.
double core_limit_extrapolated(const ModelManifold& M, double r,
                               std::span<const double> ps, double R0 = kInf);

struct PoleAsymptotics {
  double res_value;     // max |G/mu - 1|
  double res_gradient;  // max |G'/mu' - 1|
  double res_hessian;   // max |G''/mu'' - 1| (p < n)
  bool has_hessian;
};

// Residuals of the pole expansion over a grid inside (0, min(0.1, R0/10)).
PoleAsymptotics check_pole_asymptotics(const RadialKernel& K,
                                       std::span<const double> r_grid);

// int_{G in [s,t]} |grad G|^p, computed as a radius-space quadrature between
// the inverted level radii. Equals t - s on any radial kernel.
double level_energy(const RadialKernel& K, double s, double t);

// Least-squares slope of log G_p vs log r over [r_lo, r_hi]; matches
// -(b-p)/(p-1) on power-like tails with volume exponent b.
double decay_exponent(const ModelManifold& M, double p, double r_lo,
                      double r_hi, int npts = 65);

}  // namespace gimcf
