#include "gimcf/psolver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace gimcf {

void SolverConfig::validate() const {
  if (eps_schedule.empty()) {
    throw std::invalid_argument("solver config: eps schedule is empty");
  }
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0)) {
      throw std::invalid_argument("solver config: eps must be positive");
    }
    if (i && !(eps_schedule[i] < eps_schedule[i - 1])) {
      throw std::invalid_argument("solver config: eps schedule must decrease");
    }
  }
  if (!(newton_tol > 0) || max_iters < 1 || !(armijo_c > 0) ||
      !(backtrack > 0) || !(backtrack < 1)) {
    throw std::invalid_argument("solver config: bad tolerances");
  }
}

void ContinuationSchedule::validate() const {
  if (p_sequence.empty()) {
    throw std::invalid_argument("continuation: empty p sequence");
  }
  for (std::size_t i = 0; i < p_sequence.size(); ++i) {
    if (!(p_sequence[i] > 1)) {
      throw std::invalid_argument("continuation: p must exceed 1");
    }
    if (i && !(p_sequence[i] < p_sequence[i - 1])) {
      throw std::invalid_argument("continuation: p sequence must decrease");
    }
  }
}

namespace {

// Precomputed element geometry: area and the constant hat-function gradients.
struct ElementData {
  double area;
  double gx[3], gy[3];
};

std::vector<ElementData> element_data(const Mesh& mesh) {
  std::vector<ElementData> els(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& T = mesh.triangles[t];
    const auto& a = mesh.vertices[T[0]];
    const auto& b = mesh.vertices[T[1]];
    const auto& c = mesh.vertices[T[2]];
    double A2 = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    ElementData e{};
    e.area = 0.5 * A2;
    e.gx[0] = (b[1] - c[1]) / A2; e.gy[0] = (c[0] - b[0]) / A2;
    e.gx[1] = (c[1] - a[1]) / A2; e.gy[1] = (a[0] - c[0]) / A2;
    e.gx[2] = (a[1] - b[1]) / A2; e.gy[2] = (b[0] - a[0]) / A2;
    els[t] = e;
  }
  return els;
}

double energy_only(const Mesh& mesh, const std::vector<ElementData>& els,
                   double p, double eps, const ScalarField& u) {
  double E = 0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& T = mesh.triangles[t];
    const auto& e = els[t];
    double gx = 0, gy = 0;
    for (int k = 0; k < 3; ++k) {
      gx += u[T[k]] * e.gx[k];
      gy += u[T[k]] * e.gy[k];
    }
    E += e.area * std::pow(eps * eps + gx * gx + gy * gy, 0.5 * p);
  }
  return E;
}

EnergyEval energy_grad(const Mesh& mesh, const std::vector<ElementData>& els,
                       double p, double eps, const ScalarField& u) {
  EnergyEval out;
  out.value = 0;
  out.gradient = ScalarField::Zero(u.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& T = mesh.triangles[t];
    const auto& e = els[t];
    double gx = 0, gy = 0;
    for (int k = 0; k < 3; ++k) {
      gx += u[T[k]] * e.gx[k];
      gy += u[T[k]] * e.gy[k];
    }
    double s = eps * eps + gx * gx + gy * gy;
    out.value += e.area * std::pow(s, 0.5 * p);
    double w = e.area * p * std::pow(s, 0.5 * p - 1.0);
    for (int k = 0; k < 3; ++k) {
      out.gradient[T[k]] += w * (gx * e.gx[k] + gy * e.gy[k]);
    }
  }
  return out;
}

}  // namespace

EnergyEval p_energy(const Mesh& mesh, double p, double eps,
                    const ScalarField& field) {
  if (!(p > 1) || eps < 0) {
    throw std::invalid_argument("p_energy: need p > 1 and eps >= 0");
  }
  if (field.size() != mesh.num_vertices()) {
    throw std::invalid_argument("p_energy: field/mesh size mismatch");
  }
  auto els = element_data(mesh);
  for (const auto& e : els) {
    if (!(e.area > 0)) throw std::invalid_argument("p_energy: degenerate triangle");
  }
  return energy_grad(mesh, els, p, eps, field);
}

namespace {

struct Constraints {
  std::vector<int> free_of_vertex;  // -1 on Dirichlet nodes
  std::vector<int> vertex_of_free;
};

Constraints capacitor_constraints(const Mesh& mesh) {
  auto inner = mesh.tagged_vertices(BoundaryTag::Inner);
  auto outer = mesh.tagged_vertices(BoundaryTag::Outer);
  if (inner.empty() || outer.empty()) {
    throw std::invalid_argument("capacitor: inner and outer tags must be non-empty");
  }
  std::vector<char> dir(mesh.num_vertices(), 0);
  for (int v : inner) dir[v] = 1;
  for (int v : outer) {
    if (dir[v]) {
      throw std::invalid_argument(
          "capacitor: a vertex carries both inner and outer tags");
    }
    dir[v] = 2;
  }
  Constraints c;
  c.free_of_vertex.assign(mesh.num_vertices(), -1);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!dir[v]) {
      c.free_of_vertex[v] = int(c.vertex_of_free.size());
      c.vertex_of_free.push_back(v);
    }
  }
  return c;
}

// One fixed-eps Newton stage with Armijo backtracking; descent direction
// falls back to the negative gradient when the Hessian factorization fails.
void newton_stage(const Mesh& mesh, const std::vector<ElementData>& els,
                  const Constraints& con, double p, double eps,
                  const SolverConfig& cfg, ScalarField& u, SolveStats* stats,
                  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& ldlt,
                  bool& pattern_ready, int stage_id) {
  const int nfree = int(con.vertex_of_free.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(9 * mesh.num_triangles());
  Eigen::SparseMatrix<double> H(nfree, nfree);
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    EnergyEval eg = energy_grad(mesh, els, p, eps, u);
    Eigen::VectorXd g(nfree);
    for (int i = 0; i < nfree; ++i) g[i] = eg.gradient[con.vertex_of_free[i]];
    double gn = g.norm();
    if (stats) stats->final_residual = gn;
    if (gn < cfg.newton_tol) return;

    trips.clear();
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const auto& T = mesh.triangles[t];
      const auto& e = els[t];
      double gx = 0, gy = 0;
      for (int k = 0; k < 3; ++k) {
        gx += u[T[k]] * e.gx[k];
        gy += u[T[k]] * e.gy[k];
      }
      double s = eps * eps + gx * gx + gy * gy;
      double w1 = e.area * p * std::pow(s, 0.5 * p - 1.0);
      double w2 = e.area * p * (p - 2.0) * std::pow(s, 0.5 * p - 2.0);
      for (int k = 0; k < 3; ++k) {
        int fk = con.free_of_vertex[T[k]];
        if (fk < 0) continue;
        double dk = gx * e.gx[k] + gy * e.gy[k];
        for (int l = 0; l < 3; ++l) {
          int fl = con.free_of_vertex[T[l]];
          if (fl < 0) continue;
          double dl = gx * e.gx[l] + gy * e.gy[l];
          double v = w1 * (e.gx[k] * e.gx[l] + e.gy[k] * e.gy[l]) + w2 * dk * dl;
          trips.emplace_back(fk, fl, v);
        }
      }
    }
    H.setFromTriplets(trips.begin(), trips.end());
    if (!pattern_ready) {
      ldlt.analyzePattern(H);
      pattern_ready = true;
    }
    ldlt.factorize(H);
    Eigen::VectorXd d;
    bool newton_ok = (ldlt.info() == Eigen::Success);
    if (newton_ok) {
      d = ldlt.solve(-g);
      newton_ok = (ldlt.info() == Eigen::Success) && (d.dot(g) < 0);
    }
    if (!newton_ok) {
      d = -g;
      if (stats) stats->gradient_fallbacks++;
    }
    double gd = g.dot(d);
    double t_step = 1.0;
    double E0 = eg.value;
    ScalarField trial = u;
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls) {
      for (int i = 0; i < nfree; ++i) {
        trial[con.vertex_of_free[i]] = u[con.vertex_of_free[i]] + t_step * d[i];
      }
      double E1 = energy_only(mesh, els, p, eps, trial);
      if (E1 <= E0 + cfg.armijo_c * t_step * gd) {
        accepted = true;
        break;
      }
      t_step *= cfg.backtrack;
    }
    if (!accepted) {
      std::ostringstream os;
      os << "capacitor solve: line search stalled at eps = " << eps
         << ", residual = " << gn;
      throw std::runtime_error(os.str());
    }
    u = trial;
    if (stats) {
      stats->total_newton_iters++;
      stats->energy_trace.emplace_back(stage_id, energy_only(mesh, els, p, eps, u));
    }
  }
  EnergyEval eg = energy_grad(mesh, els, p, eps, u);
  double gn = 0;
  for (int i = 0; i < nfree; ++i) {
    double gi = eg.gradient[con.vertex_of_free[i]];
    gn += gi * gi;
  }
  gn = std::sqrt(gn);
  if (gn >= cfg.newton_tol) {
    std::ostringstream os;
    os << "capacitor solve: no convergence within " << cfg.max_iters
       << " iterations at eps = " << eps << "; last residual = " << gn;
    throw std::runtime_error(os.str());
  }
}

}  // namespace

ScalarField solve_capacitor(const Mesh& mesh, double p,
                            const SolverConfig& config, const ScalarField* init,
                            SolveStats* stats) {
  if (!(p > 1) || !(p <= 3)) {
    throw std::invalid_argument("solve_capacitor: p must lie in (1, 3]");
  }
  config.validate();
  mesh.validate();
  auto els = element_data(mesh);
  auto con = capacitor_constraints(mesh);
  ScalarField u = ScalarField::Zero(mesh.num_vertices());
  if (init) {
    if (init->size() != mesh.num_vertices()) {
      throw std::invalid_argument("solve_capacitor: init size mismatch");
    }
    u = *init;
  }
  for (int v : mesh.tagged_vertices(BoundaryTag::Inner)) u[v] = 1.0;
  for (int v : mesh.tagged_vertices(BoundaryTag::Outer)) u[v] = 0.0;

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool pattern_ready = false;
  if (!init) {
    // Harmonic start: the p = 2 energy is quadratic, one Newton step solves it.
    newton_stage(mesh, els, con, 2.0, 0.0, config, u, stats, ldlt, pattern_ready, -1);
  }
  int stage = 0;
  for (double eps : config.eps_schedule) {
    newton_stage(mesh, els, con, p, eps, config, u, stats, ldlt, pattern_ready, stage++);
  }
  return u;
}

ScalarField moser_transform(const ScalarField& field, double p, double floor) {
  if (!(floor > 0)) throw std::invalid_argument("moser_transform: floor <= 0");
  ScalarField u(field.size());
  for (Eigen::Index i = 0; i < field.size(); ++i) {
    if (field[i] < 0 && field[i] < -1e-9) {
      throw std::invalid_argument("moser_transform: field significantly negative");
    }
    u[i] = (1.0 - p) * std::log(std::max(field[i], floor));
  }
  return u;
}

double residual_pharmonic(const Mesh& mesh, double p, const ScalarField& field,
                          const SolverConfig& config) {
  config.validate();
  double eps = config.eps_schedule.back();
  auto con = capacitor_constraints(mesh);
  EnergyEval eg = p_energy(mesh, p, eps, field);
  double gn = 0;
  for (int v : con.vertex_of_free) gn += eg.gradient[v] * eg.gradient[v];
  return std::sqrt(gn);
}

ContinuationResult continue_to_one(const Mesh& mesh,
                                   const ContinuationSchedule& schedule,
                                   const SolverConfig& config) {
  schedule.validate();
  ContinuationResult out;
  const ScalarField* init = nullptr;
  for (double p : schedule.p_sequence) {
    try {
      ScalarField v = solve_capacitor(mesh, p, config,
                                      schedule.warm_start ? init : nullptr);
      out.ps.push_back(p);
      out.v_fields.push_back(std::move(v));
      out.u_fields.push_back(
          moser_transform(out.v_fields.back(), p, out.moser_floor));
      init = &out.v_fields.back();
    } catch (const std::exception& e) {
      out.failure = "stage p = " + std::to_string(p) + ": " + e.what();
      return out;
    }
  }
  if (out.ps.size() >= 2) {
    std::size_t k = out.ps.size() - 1;
    double x1 = out.ps[k - 1] - 1.0, x2 = out.ps[k] - 1.0;
    out.u_extrapolated =
        (x1 * out.u_fields[k] - x2 * out.u_fields[k - 1]) / (x1 - x2);
  }
  out.complete = true;
  return out;
}

double field_at(const Mesh& mesh, const ScalarField& field, double x, double y) {
  if (field.size() != mesh.num_vertices()) {
    throw std::invalid_argument("field_at: field/mesh size mismatch");
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& T = mesh.triangles[t];
    const auto& a = mesh.vertices[T[0]];
    const auto& b = mesh.vertices[T[1]];
    const auto& c = mesh.vertices[T[2]];
    double A2 = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    double l0 = ((b[0] - x) * (c[1] - y) - (c[0] - x) * (b[1] - y)) / A2;
    double l1 = ((c[0] - x) * (a[1] - y) - (a[0] - x) * (c[1] - y)) / A2;
    double l2 = 1.0 - l0 - l1;
    double tol = -1e-10;
    if (l0 >= tol && l1 >= tol && l2 >= tol) {
      return l0 * field[T[0]] + l1 * field[T[1]] + l2 * field[T[2]];
    }
  }
  throw std::domain_error("field_at: point outside the mesh");
}

}  // namespace gimcf
