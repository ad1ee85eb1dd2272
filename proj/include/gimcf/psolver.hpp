#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "gimcf/mesh.hpp"

namespace gimcf {

using ScalarField = Eigen::VectorXd;  // nodal values aligned with mesh vertices

struct SolverConfig {
  // Regularization ramp: each stage minimizes sum_T A_T (eps^2+|grad u|^2)^(p/2)
  // by damped Newton, warm-starting the next smaller eps.
  std::vector<double> eps_schedule{1e-1, 1e-2, 1e-4, 1e-6, 1e-8};
  double newton_tol = 1e-10;  // free-gradient norm target per stage
  int max_iters = 200;        // per stage
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  void validate() const;
};

struct SolveStats {
  int total_newton_iters = 0;
  int gradient_fallbacks = 0;
  double final_residual = 0;
  // (stage index, energy after each accepted step); energies are
  // non-increasing within a stage, stages re-target the objective.
  std::vector<std::pair<int, double>> energy_trace;
};

struct EnergyEval {
  double value;
  ScalarField gradient;  // full-length; includes constrained nodes
};

// Regularized p-Dirichlet energy of a piecewise-linear field and its exact
// nodal gradient. One-point quadrature is exact here: element gradients are
// constant.
EnergyEval p_energy(const Mesh& mesh, double p, double eps,
                    const ScalarField& field);

// Minimizes the ramped energy subject to field = 1 on Inner and 0 on Outer
// nodes. init (when given) seeds the free nodes. Throws std::runtime_error
// with the last residual on non-convergence.
ScalarField solve_capacitor(const Mesh& mesh, double p,
                            const SolverConfig& config,
                            const ScalarField* init = nullptr,
                            SolveStats* stats = nullptr);

// u = (1-p) log(max(field, floor)); the floor clamps the outer-boundary
// zeros, where the transform diverges.
ScalarField moser_transform(const ScalarField& field, double p,
                            double floor = 1e-30);

// Norm of the energy gradient over unconstrained nodes at the final eps.
double residual_pharmonic(const Mesh& mesh, double p, const ScalarField& field,
                          const SolverConfig& config);

struct ContinuationSchedule {
  std::vector<double> p_sequence{1.5, 1.3, 1.2, 1.1, 1.05, 1.02};
  bool warm_start = true;
  void validate() const;  // entries > 1, strictly decreasing
};

struct ContinuationResult {
  std::vector<double> ps;              // completed stages
  std::vector<ScalarField> v_fields;   // capacitor potentials
  std::vector<ScalarField> u_fields;   // Moser transforms
  ScalarField u_extrapolated;          // linear in (p-1) from the last two
  double moser_floor = 1e-30;
  bool complete = false;
  std::string failure;                 // set when a stage aborted
};

// Capacitor solves along a decreasing p-sequence with warm starts, plus the
// p -> 1 extrapolation of the transformed fields.
ContinuationResult continue_to_one(const Mesh& mesh,
                                   const ContinuationSchedule& schedule,
                                   const SolverConfig& config);

// Piecewise-linear evaluation at an interior point (barycentric).
double field_at(const Mesh& mesh, const ScalarField& field, double x, double y);

}  // namespace gimcf
