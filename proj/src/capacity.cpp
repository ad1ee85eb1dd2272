#include "gimcf/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gimcf/constants.hpp"
#include "gimcf/mesh.hpp"
#include "gimcf/psolver.hpp"
#include "gimcf/quadrature.hpp"

namespace gimcf {

void CapacitySpec::validate() const {
  if (!(p > 1) || !(p < nu)) {
    throw std::invalid_argument("capacity spec: need 1 < p < nu");
  }
  if (!(S > 0)) throw std::invalid_argument("capacity spec: need S > 0");
  if (!eta) throw std::invalid_argument("capacity spec: eta missing");
}

RadialCapacity cap_radial(const ModelManifold& M, double p, double s,
                          double R) {
  if (!(p > 1)) throw std::invalid_argument("cap_radial: need p > 1");
  if (!(s > 0) || !(s < R) || R > M.r_max()) {
    throw std::invalid_argument("cap_radial: need 0 < s < R <= r_max");
  }
  auto f = [&](double r) {
    return std::pow(M.unit_sphere_area() * std::pow(M.warp(r), M.dim() - 1),
                    -1.0 / (p - 1.0));
  };
  double integral;
  if (R == kInf) {
    if (!M.green_tail_converges(p)) return {0.0, true};
    integral = integrate_to_infinity_split(f, s, M.quadrature_tol(),
                                           M.smoothness_breaks());
  } else {
    integral = integrate_split(f, s, R, M.quadrature_tol(),
                               M.smoothness_breaks());
  }
  return {std::pow(integral, 1.0 - p), false};
}

CapLevelCheck verify_cap_level(const ModelManifold& M, double p, double R0,
                               double ell) {
  RadialKernel K = green_radial(M, p, R0);
  if (K.parabolic()) {
    throw std::domain_error("verify_cap_level: kernel absent (parabolic)");
  }
  double r_ell = K.invert_level(ell);  // throws when ell is out of range
  CapLevelCheck out{};
  out.level_radius = r_ell;
  out.lhs = cap_radial(M, p, r_ell, R0).value;
  out.rhs = std::pow(ell, 1.0 - p);
  out.rel_err = std::abs(out.lhs - out.rhs) / std::abs(out.rhs);
  return out;
}

double cap_lower_bound_sobolev(const CapacitySpec& spec, double t,
                               double ball_volume_at_t) {
  spec.validate();
  if (!(t > 0) || !(ball_volume_at_t > 0)) {
    throw std::invalid_argument("cap_lower_bound_sobolev: bad arguments");
  }
  return std::pow(spec.eta(t), -spec.p / spec.nu) *
         std::pow(ball_volume_at_t, (spec.nu - spec.p) / spec.nu) / spec.S;
}

double inf_decay_bound(const CapacitySpec& spec, double t) {
  spec.validate();
  if (!(t > 0)) throw std::invalid_argument("inf_decay_bound: need t > 0");
  double q = 1.0 / (spec.p - 1.0);
  return std::pow(chat(spec.p, spec.nu, spec.S), q) *
         std::pow(spec.eta(2 * t), q) *
         std::pow(t, -(spec.nu - spec.p) * q);
}

std::function<double(double)> eta_from_model(const ModelManifold& M, double nu,
                                             double r_hi, int npts) {
  if (npts < 16 || !(r_hi > 0) || r_hi > M.r_max()) {
    throw std::invalid_argument("eta_from_model: bad grid");
  }
  double r_lo = 1e-8 * r_hi;
  auto grid = std::make_shared<std::vector<double>>(npts);
  auto env = std::make_shared<std::vector<double>>(npts);
  double running = 0;
  for (int i = 0; i < npts; ++i) {
    double r = r_lo * std::pow(r_hi / r_lo, double(i) / (npts - 1));
    (*grid)[i] = std::log(r);
    running = std::max(running, std::pow(r, nu) / ball_volume(M, r));
    (*env)[i] = running;
  }
  return [grid, env, r_lo, r_hi](double r) {
    if (!(r > 0) || r > r_hi * (1 + 1e-12)) {
      throw std::domain_error("eta: radius outside the tabulated range");
    }
    if (r <= r_lo) return env->front();
    double lx = std::log(r);
    auto it = std::upper_bound(grid->begin(), grid->end(), lx);
    std::size_t j = std::min<std::size_t>(grid->size() - 1,
                                          std::max<std::ptrdiff_t>(1, it - grid->begin()));
    double t = ((lx - (*grid)[j - 1]) / ((*grid)[j] - (*grid)[j - 1]));
    t = std::clamp(t, 0.0, 1.0);
    return (1 - t) * (*env)[j - 1] + t * (*env)[j];
  };
}

double cap_variational(const Mesh& mesh, double p, const SolverConfig& config) {
  ScalarField v = solve_capacitor(mesh, p, config);
  double eps = config.eps_schedule.empty() ? 0.0 : config.eps_schedule.back();
  return p_energy(mesh, p, eps, v).value;
}

}  // namespace gimcf
