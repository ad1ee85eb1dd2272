#pragma once

#include <functional>

#include "gimcf/kernel.hpp"
#include "gimcf/model.hpp"

namespace gimcf {

// Inputs of the weighted Sobolev inequality used by the capacity bounds:
// dimension nu, constant S, and a positive non-decreasing weight eta.
struct CapacitySpec {
  double p = 2;
  double nu = 3;
  double S = 1;
  std::function<double(double)> eta = [](double) { return 1.0; };

  void validate() const;
};

struct RadialCapacity {
  double value = 0;
  bool degenerate = false;  // condenser integral diverges (capacity 0)
};

// cap_p(B_s, B_R) on a model: ( int_s^R v_h^{-1/(p-1)} )^{1-p}.
// R = kInf is allowed; on parabolic models the value is 0 with the flag set.
RadialCapacity cap_radial(const ModelManifold& M, double p, double s, double R);

struct CapLevelCheck {
  double lhs;           // capacity of the superlevel set {G >= ell}
  double rhs;           // ell^{1-p}
  double rel_err;
  double level_radius;  // r with G(r) = ell
};

// Capacity/level-set identity of the radial kernel, both sides by quadrature.
CapLevelCheck verify_cap_level(const ModelManifold& M, double p, double R0,
                               double ell);

// S^{-1} eta(t)^{-p/nu} |B_t|^{(nu-p)/nu}
double cap_lower_bound_sobolev(const CapacitySpec& spec, double t,
                               double ball_volume_at_t);

// chat(p,nu,S)^{1/(p-1)} eta(2t)^{1/(p-1)} t^{-(nu-p)/(p-1)}; dominates the
// boundary infimum of the kernel whenever (eta, nu, S) certify the weighted
// Sobolev inequality.
double inf_decay_bound(const CapacitySpec& spec, double t);

// The canonical weight eta(r) = sup_{s<=r} s^nu / |B_s|, tabulated as a
// running maximum on a log grid.
std::function<double(double)> eta_from_model(const ModelManifold& M, double nu,
                                             double r_hi = 1e3, int npts = 400);

struct Mesh;
struct SolverConfig;

// Discrete p-capacity of the tagged condenser: the regularized p-Dirichlet
// energy of the capacitor minimizer (eps ramped to its final value).
double cap_variational(const Mesh& mesh, double p, const SolverConfig& config);

}  // namespace gimcf
