#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace gimcf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class WarpKind { Euclidean, Hyperbolic, Spherical, PowerTail, Table };

// Rotationally symmetric model: metric dr^2 + h(r)^2 g_{S^{n-1}}.
// All geometric quantities reduce to 1D evaluations of the warping h.
class ModelManifold {
 public:
  static ModelManifold euclidean(int n, double r_max = kInf,
                                 double quad_tol = 1e-10);
  static ModelManifold hyperbolic(int n, double kappa, double r_max = kInf,
                                  double quad_tol = 1e-10);
  // Spherical warps close up at r = pi/kappa; r_max must stay strictly below.
  static ModelManifold spherical(int n, double kappa, double r_max,
                                 double quad_tol = 1e-10);
  // h(r) = r for r <= r0/2, h(r) = c r^alpha for r >= r0, blended C^1 in
  // between. The blend is quadratic in log-log coordinates so that
  // r h'(r)/h(r) falls linearly from 1 to alpha; for alpha <= 1 this keeps
  // h' <= 1 throughout, which the gradient-estimate checks rely on.
  static ModelManifold power_tail(int n, double alpha, double r0,
                                  double r_max = kInf, double quad_tol = 1e-10);
  // Strictly increasing samples (r_i, h_i); node derivatives by centered
  // second-order differences with one-sided closures at the ends.
  static ModelManifold table(int n, std::vector<double> r,
                             std::vector<double> h,
                             double quad_tol = 1e-10);

  static ModelManifold from_json(const nlohmann::json& j);
  static ModelManifold from_file(const std::string& path);
  nlohmann::json to_json() const;

  int dim() const { return n_; }
  WarpKind kind() const { return kind_; }
  double r_max() const { return rmax_; }
  double quadrature_tol() const { return qtol_; }
  double unit_sphere_area() const { return omega_; }  // omega_{n-1}
  std::string id() const;

  double warp(double r) const;        // h(r)
  double warp_deriv(double r) const;  // h'(r)
  bool derivative_flagged() const { return deriv_flag_; }

  bool nondecreasing_on(double a, double b) const;
  // Convergence of int^inf v_h^{-1/(p-1)}, decided from the tail form of h,
  // not from numerical truncation. Only meaningful when r_max is infinite.
  bool green_tail_converges(double p) const;
  // Exponent b with |B_r| ~ r^b at infinity, for power-like tails only.
  double volume_growth_exponent() const;
  double tail_coefficient() const;  // c in h = c r^alpha (power tails)

  double kappa() const { return kappa_; }
  double alpha() const { return alpha_; }
  double blend_r0() const { return r0_; }

  // Radii where h is only C^1 (piecewise-defined warps); integrals split here.
  std::span<const double> smoothness_breaks() const { return breaks_; }

 private:
  ModelManifold() = default;
  void validate_pole() const;

  WarpKind kind_ = WarpKind::Euclidean;
  int n_ = 2;
  double kappa_ = 0, alpha_ = 1, r0_ = 1, tail_c_ = 1;
  double rmax_ = kInf, qtol_ = 1e-10, omega_ = 0;
  std::vector<double> tr_, th_, tm_;  // table nodes + slopes
  std::vector<double> breaks_;
  bool deriv_flag_ = false;
};

double unit_sphere_area(int n);  // 2 pi^{n/2} / Gamma(n/2)

// v_h(r) = omega_{n-1} h(r)^{n-1}
double sphere_area(const ModelManifold& M, double r);
// |B_r| = int_0^r v_h
double ball_volume(const ModelManifold& M, double r);
// H(r) = (n-1) h'(r)/h(r)
double mean_curvature_sphere(const ModelManifold& M, double r);

struct GeometryDiagnostics {
  double doubling_constant;      // C_D: sup |B_2r|/|B_r| over the grid
  double doubling_dimension;     // nu = log2 C_D
  double rd_exponent;            // b: least-squares slope of log|B_t| vs log t
  double rd_constant;            // C_R: worst pair of |B_t|/|B_s| (s/t)^b
  double isoperimetric_constant; // c_I: inf P / |E|^{(n-1)/n} over balls
};

// Grid must be strictly increasing with at least 8 points and 2*grid.back()
// inside the domain.
GeometryDiagnostics diagnostics(const ModelManifold& M,
                                std::span<const double> grid);

}  // namespace gimcf
