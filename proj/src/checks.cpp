#include "gimcf/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <numbers>
#include <random>
#include <sstream>

#include "gimcf/capacity.hpp"
#include "gimcf/constants.hpp"
#include "gimcf/imcf.hpp"
#include "gimcf/kernel.hpp"
#include "gimcf/mesh.hpp"
#include "gimcf/model.hpp"
#include "gimcf/psolver.hpp"

namespace gimcf {

namespace {

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = a * std::pow(b / a, double(i) / (n - 1));
  }
  return v;
}

struct Failure {
  std::string msg;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// --- 1. kernel identities ---------------------------------------------------
std::string check_kernel_identities() {
  auto M3 = ModelManifold::euclidean(3);
  RadialKernel K = green_radial(M3, 2.0);
  double worst_mu = 0;
  for (const auto& s : K.samples()) {
    worst_mu = std::max(worst_mu, std::abs(s.G / mu(3, 2.0, s.r) - 1.0));
  }
  expect(worst_mu < 1e-6, "kernel vs mu rel err " + fmt(worst_mu));

  struct Case {
    ModelManifold M;
    double p;
    int pairs;
  };
  std::vector<Case> cases;
  cases.push_back({ModelManifold::euclidean(3), 2.0, 7});
  cases.push_back({ModelManifold::hyperbolic(2, 1.0), 1.5, 7});
  cases.push_back({ModelManifold::power_tail(2, 0.5, 1.0), 1.25, 6});
  double worst_le = 0;
  int total_pairs = 0;
  for (const auto& c : cases) {
    RadialKernel Kc = green_radial(c.M, c.p);
    double gmin = Kc.samples().back().G, gmax = Kc.samples().front().G;
    auto ss = logspace(gmin * 10, gmax / 20, c.pairs);
    for (double s : ss) {
      double t = 2 * s;
      double le = level_energy(Kc, s, t);
      worst_le = std::max(worst_le, std::abs(le - (t - s)) / (t - s));
      ++total_pairs;
    }
  }
  expect(total_pairs >= 20, "only " + std::to_string(total_pairs) + " pairs");
  expect(worst_le < 1e-5, "level energy rel err " + fmt(worst_le));
  return "kernel vs mu " + fmt(worst_mu) + "; level energy " + fmt(worst_le) +
         " over " + std::to_string(total_pairs) + " pairs";
}

// --- 2. capacity identity ---------------------------------------------------
std::string check_capacity_identity() {
  struct Case {
    ModelManifold M;
    double R0;
  };
  std::vector<Case> cases;
  cases.push_back({ModelManifold::euclidean(3), 10.0});
  cases.push_back({ModelManifold::hyperbolic(2, 1.0), 5.0});
  cases.push_back({ModelManifold::power_tail(2, 0.5, 1.0), 50.0});
  double worst = 0;
  for (const auto& c : cases) {
    for (double p : {1.3, 1.5, 2.0}) {
      RadialKernel K = green_radial(c.M, p, c.R0);
      double gmin = K.samples().back().G;
      double gmax = K.samples().front().G;
      // G vanishes at R0; keep levels well inside the sampled range
      for (double ell : logspace(gmax * 1e-6, gmax / 20, 5)) {
        if (!(ell > gmin)) ell = 2 * gmin + gmax * 1e-9;
        auto chk = verify_cap_level(c.M, p, c.R0, ell);
        worst = std::max(worst, chk.rel_err);
      }
    }
  }
  expect(worst < 1e-3, "cap/level rel err " + fmt(worst));
  return "worst rel err " + fmt(worst) + " over 3 models x 5 levels x 3 p";
}

// --- 3. pole asymptotics ----------------------------------------------------
std::string check_pole() {
  auto H3 = ModelManifold::hyperbolic(3, 1.0);
  RadialKernel K = green_radial(H3, 2.0);
  auto g_coarse = logspace(0.0099, 0.099, 12);
  auto g_fine = logspace(0.00099, 0.0099, 12);
  auto r1 = check_pole_asymptotics(K, g_coarse);
  auto r2 = check_pole_asymptotics(K, g_fine);
  expect(r1.has_hessian, "expected a Hessian residual for p < n");
  expect(r2.res_value * 3 <= r1.res_value,
         "value residual shrank only " + fmt(r1.res_value / r2.res_value) + "x");
  expect(r2.res_gradient * 3 <= r1.res_gradient,
         "gradient residual shrank only " + fmt(r1.res_gradient / r2.res_gradient) + "x");
  expect(r2.res_hessian * 3 <= r1.res_hessian,
         "hessian residual shrank only " + fmt(r1.res_hessian / r2.res_hessian) + "x");

  auto E3 = ModelManifold::euclidean(3);
  RadialKernel KE = green_radial(E3, 2.0);
  auto re = check_pole_asymptotics(KE, g_coarse);
  double emax = std::max({re.res_value, re.res_gradient, re.res_hessian});
  expect(emax < 1e-10, "euclidean residual " + fmt(emax));
  return "hyperbolic shrink factors " + fmt(r1.res_value / r2.res_value) + "/" +
         fmt(r1.res_gradient / r2.res_gradient) + "/" +
         fmt(r1.res_hessian / r2.res_hessian) + "; euclidean max " + fmt(emax);
}

// --- 4. decay exponent -------------------------------------------------------
std::string check_decay() {
  auto P = ModelManifold::power_tail(2, 0.5, 1.0);
  const double b = P.volume_growth_exponent();  // 1.5
  std::ostringstream os;
  for (double p : {1.1, 1.25}) {
    double slope = decay_exponent(P, p, 10.0, 1000.0);
    double want = -(b - p) / (p - 1.0);
    expect(std::abs(slope - want) <= 0.03 * std::abs(want),
           "power-tail slope " + fmt(slope) + " vs " + fmt(want));
    os << "p=" << p << ": " << fmt(slope) << " vs " << fmt(want) << "; ";
  }
  auto E3 = ModelManifold::euclidean(3);
  double se = decay_exponent(E3, 2.0, 1.0, 100.0);
  expect(std::abs(se + 1.0) <= 0.03, "euclidean slope " + fmt(se));
  os << "euclid p=2: " << fmt(se);
  return os.str();
}

// --- 5. solver oracle ---------------------------------------------------------
double annulus_exact(double p, double r0, double R, double r) {
  if (p == 2.0) return std::log(r / R) / std::log(r0 / R);
  double beta = (p - 2.0) / (p - 1.0);
  return (std::pow(r, beta) - std::pow(R, beta)) /
         (std::pow(r0, beta) - std::pow(R, beta));
}

double annulus_max_err(const Mesh& mesh, double p, double r0, double R,
                       const SolverConfig& cfg) {
  ScalarField v = solve_capacitor(mesh, p, cfg);
  double err = 0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    double r = std::hypot(mesh.vertices[i][0], mesh.vertices[i][1]);
    err = std::max(err, std::abs(v[i] - annulus_exact(p, r0, R, r)));
  }
  return err;
}

std::string check_solver_oracle(std::uint64_t seed) {
  SolverConfig cfg;
  Mesh coarse = make_annulus(0.5, 1.0, 0.02);
  Mesh fine = make_annulus(0.5, 1.0, 0.01);
  std::ostringstream os;
  for (double p : {1.5, 2.0}) {
    double e1 = annulus_max_err(coarse, p, 0.5, 1.0, cfg);
    double e2 = annulus_max_err(fine, p, 0.5, 1.0, cfg);
    double rate = std::log2(e1 / e2);
    expect(e1 < 1e-2, "p=" + fmt(p) + " max err " + fmt(e1));
    expect(rate >= 0.8, "p=" + fmt(p) + " refinement rate " + fmt(rate));
    os << "p=" << p << ": err " << fmt(e1) << " -> " << fmt(e2) << " (rate "
       << fmt(rate) << "); ";
  }
  // finite-difference check of the energy gradient
  Mesh small = make_annulus(0.5, 1.0, 0.06);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ScalarField f(small.num_vertices());
  for (int i = 0; i < small.num_vertices(); ++i) f[i] = unif(rng);
  double worst = 0;
  for (double p : {1.3, 2.0, 2.5}) {
    for (double eps : {1e-2, 1e-4}) {
      EnergyEval eg = p_energy(small, p, eps, f);
      double gmax = eg.gradient.cwiseAbs().maxCoeff();
      std::uniform_int_distribution<int> pick(0, small.num_vertices() - 1);
      for (int k = 0; k < 20; ++k) {
        int i = pick(rng);
        double delta = 1e-5;
        ScalarField fp = f, fm = f;
        fp[i] += delta;
        fm[i] -= delta;
        double fd = (p_energy(small, p, eps, fp).value -
                     p_energy(small, p, eps, fm).value) /
                    (2 * delta);
        double rel = std::abs(fd - eg.gradient[i]) /
                     std::max(std::abs(eg.gradient[i]), 1e-8 * gmax);
        worst = std::max(worst, rel);
      }
    }
  }
  expect(worst < 1e-6, "gradient FD rel err " + fmt(worst));
  os << "gradient FD " << fmt(worst);
  return os.str();
}

// --- 6. obstacle limit --------------------------------------------------------
std::string check_obstacle_limit() {
  Mesh mesh = make_annulus(0.5, 1.0, 0.02);
  ContinuationSchedule sched;  // 1.5 ... 1.02
  SolverConfig cfg;
  auto res = continue_to_one(mesh, sched, cfg);
  expect(res.complete, "continuation aborted: " + res.failure);
  std::ostringstream os;
  double worst = 0;
  for (double r : {0.6, 0.75, 0.9}) {
    double got = field_at(mesh, res.u_extrapolated, r * std::cos(0.3),
                          r * std::sin(0.3));
    double want = std::log(r / 0.5);
    worst = std::max(worst, std::abs(got - want));
    os << "u(" << r << ")=" << fmt(got) << " vs " << fmt(want) << "; ";
  }
  expect(worst <= 2e-2, "probe error " + fmt(worst));
  auto outer = mesh.tagged_vertices(BoundaryTag::Outer);
  std::vector<char> is_outer(mesh.num_vertices(), 0);
  for (int v : outer) is_outer[v] = 1;
  double sup = -kInf;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (!is_outer[i]) sup = std::max(sup, res.u_extrapolated[i]);
  }
  expect(sup <= std::log(2.0) + 5e-2,
         "interior sup " + fmt(sup) + " vs cap " + fmt(std::log(2.0)));
  os << "interior sup " << fmt(sup) << " <= log 2 + 0.05";
  return os.str();
}

// --- 7. gradient estimate ------------------------------------------------------
std::string check_gradient_estimate() {
  auto grid = logspace(0.05, 20.0, 40);
  auto E3 = ModelManifold::euclidean(3);
  auto rep_e = gradient_bound_check(E3, grid);
  expect(rep_e.min_margin >= 0, "euclidean margin " + fmt(rep_e.min_margin));
  auto P = ModelManifold::power_tail(2, 0.5, 1.0);
  auto rep_p = gradient_bound_check(P, grid);
  expect(rep_p.min_margin >= 0, "power-tail margin " + fmt(rep_p.min_margin));
  auto H = ModelManifold::hyperbolic(2, 1.0);
  auto rep_h = gradient_bound_check(H, grid);
  expect(rep_h.min_margin < 0,
         "hyperbolic margin " + fmt(rep_h.min_margin) + " not negative");
  return "euclid min " + fmt(rep_e.min_margin) + ", power-tail min " +
         fmt(rep_p.min_margin) + ", hyperbolic min " + fmt(rep_h.min_margin);
}

// --- 8. barrier certificates ----------------------------------------------------
std::string check_barriers() {
  auto grid = logspace(1e-5, 5e-3, 30);
  std::ostringstream os;
  for (int n : {2, 3}) {
    auto M = ModelManifold::euclidean(n);
    auto lo = subsolution_margin(M, barrier_below(n), grid);
    expect(lo.min_margin > 0, "subsolution margin " + fmt(lo.min_margin));
    auto hi = subsolution_margin(M, barrier_above(n, 1e-2), grid);
    expect(hi.max_margin < 0, "supersolution margin " + fmt(hi.max_margin));
    os << "n=" << n << ": " << fmt(lo.min_margin) << "/" << fmt(hi.max_margin)
       << "; ";
  }
  auto E3 = ModelManifold::euclidean(3);
  int C = find_supersolution_C(E3, 1.05);
  auto rep = p_supersolution_margin(
      E3, 1.05, double(C), logspace(1e-8, 1.0 / (2.0 * C), 200));
  expect(rep.margins.max_margin <= 0,
         "certified C margin " + fmt(rep.margins.max_margin));
  os << "find_C=" << C << " max margin " << fmt(rep.margins.max_margin);
  return os.str();
}

// --- 9. constants ledger ----------------------------------------------------------
std::string check_constants() {
  expect(cbar(2, 3) == 72.0, "cbar(2,3) = " + fmt(cbar(2, 3)));
  expect(c_harnack(2, 4) == 2304.0, "c_harnack(2,4) = " + fmt(c_harnack(2, 4)));
  expect(chat(2, 4, 1) == 256.0, "chat(2,4,1) = " + fmt(chat(2, 4, 1)));
  double worst = 0;
  for (double p : {1.1, 1.5, 2.0}) {
    for (double nu : {2.5, 3.0, 4.0}) {
      auto sched = optimal_schedule(1.0, p, 600);
      double lhs = iterate_log_bound(sched, 2.0, p, nu, 1.0);
      double rhs = geometric_bound_log(1.0, 2.0, p, nu);
      worst = std::max(worst,
                       std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
  }
  expect(worst < 1e-10, "iterate vs closed form " + fmt(worst));
  auto grid = logspace(1e-4, 1e-2, 8);
  std::vector<double> ps;
  for (double x : grid) ps.push_back(1.0 + x);
  auto cls_hat =
      classify_blowup([](double p) { return chat(p, 4.0, 1.0); }, ps);
  expect(cls_hat.kind == Blowup::Bounded, "chat classified " + blowup_name(cls_hat.kind));
  double nu = 3.0;
  auto cls_un =
      classify_blowup([nu](double p) { return c_unstable(p, nu, 1.0); }, ps);
  expect(cls_un.kind == Blowup::Polynomial,
         "c_unstable classified " + blowup_name(cls_un.kind));
  expect(std::abs(cls_un.fitted_exponent - (nu - 1.0)) <= 0.05,
         "fitted degree " + fmt(cls_un.fitted_exponent) + " vs " + fmt(nu - 1));
  return "exact values ok; iterate residual " + fmt(worst) +
         "; c_unstable degree " + fmt(cls_un.fitted_exponent);
}

// --- 10. no-go certificate ----------------------------------------------------------
std::string check_nogo(std::uint64_t seed) {
  // threshold from the two sufficient conditions, then margins on a grid
  double probe[1] = {1.0 + 1e-6};
  auto rep0 = nogo_certificate(1.0, 1.0, 1.0, probe);
  std::vector<double> grid;
  for (int i = 0; i < 6; ++i) {
    grid.push_back(1.0 + (rep0.p0 - 1.0) * std::pow(10.0, -2.5 + 0.5 * i));
  }
  auto rep = nogo_certificate(1.0, 1.0, 1.0, grid);
  double min_margin = kInf;
  for (const auto& pt : rep.points) min_margin = std::min(min_margin, pt.margin);
  expect(min_margin > 0, "nogo margin " + fmt(min_margin));

  double p = 1.0 + 0.5 * (rep.p0 - 1.0);
  double opt = optimal_log_product(1.0, p);
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  double best_gap = kInf;
  for (int trial = 0; trial < 1000; ++trial) {
    const int K = 64;
    std::vector<double> x(K);
    double sum = 0;
    for (int k = 0; k < K; ++k) {
      x[k] = expo(rng);
      sum += x[k];
    }
    double logprod = 0, w = 1.0;
    for (int k = 0; k < K; ++k) {
      logprod += w * std::log(x[k] / sum);  // normalized to t0 = 1
      w /= p;
    }
    best_gap = std::min(best_gap, opt - logprod);
  }
  expect(best_gap > 0, "a random schedule beat the optimum by " + fmt(-best_gap));
  return "p0 = " + fmt(rep.p0) + ", min margin " + fmt(min_margin) +
         ", closest random schedule gap " + fmt(best_gap);
}

// --- 11. cross-module consistency -----------------------------------------------------
std::string check_cross_module() {
  std::vector<ModelManifold> models;
  models.push_back(ModelManifold::euclidean(2));
  models.push_back(ModelManifold::euclidean(3));
  models.push_back(ModelManifold::hyperbolic(2, 1.0));
  models.push_back(ModelManifold::power_tail(2, 0.5, 1.0));
  models.push_back(ModelManifold::spherical(2, 1.0, 1.2));
  double worst = 0;
  for (const auto& M : models) {
    for (double r : logspace(0.05, std::min(0.8 * M.r_max(), 20.0), 12)) {
      double diff = core_limit(M, r) - imcf_core_model(M, r) -
                    std::log(M.unit_sphere_area());
      worst = std::max(worst, std::abs(diff));
    }
  }
  expect(worst < 1e-10, "core identity residual " + fmt(worst));
  std::vector<double> ps{1.2, 1.1, 1.05, 1.02};
  double worst_ex = 0;
  auto E3 = ModelManifold::euclidean(3);
  worst_ex = std::max(worst_ex, std::abs(core_limit_extrapolated(E3, 1.0, ps) -
                                         core_limit(E3, 1.0)));
  auto H2 = ModelManifold::hyperbolic(2, 1.0);
  worst_ex = std::max(worst_ex, std::abs(core_limit_extrapolated(H2, 1.0, ps) -
                                         core_limit(H2, 1.0)));
  expect(worst_ex < 1e-2, "p->1 extrapolation error " + fmt(worst_ex));
  return "identity residual " + fmt(worst) + "; extrapolation error " +
         fmt(worst_ex);
}

struct CheckSpec {
  int id;
  const char* name;
  double budget_seconds;
  std::function<std::string()> run;
};

}  // namespace

std::string format_check_line(const CheckResult& r) {
  std::ostringstream os;
  os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.name << " ("
     << r.detail << ") [" << fmt(r.seconds) << " s]";
  return os.str();
}

std::vector<CheckResult> run_acceptance_checks(std::uint64_t seed,
                                               int max_threads) {
  std::vector<CheckSpec> specs{
      {1, "kernel identities", 5, [] { return check_kernel_identities(); }},
      {2, "capacity/level-set identity", 10, [] { return check_capacity_identity(); }},
      {3, "pole asymptotics", 5, [] { return check_pole(); }},
      {4, "decay exponent", 10, [] { return check_decay(); }},
      {5, "solver oracle", 60, [seed] { return check_solver_oracle(seed); }},
      {6, "obstacle flow limit", 120, [] { return check_obstacle_limit(); }},
      {7, "gradient estimate", 1, [] { return check_gradient_estimate(); }},
      {8, "barrier certificates", 5, [] { return check_barriers(); }},
      {9, "constants ledger", 5, [] { return check_constants(); }},
      {10, "no-go certificate", 10, [seed] { return check_nogo(seed); }},
      {11, "cross-module consistency", 10, [] { return check_cross_module(); }},
  };
  auto run_one = [](const CheckSpec& s) {
    CheckResult r{s.id, s.name, false, "", 0};
    auto t0 = std::chrono::steady_clock::now();
    try {
      r.detail = s.run();
      r.passed = true;
    } catch (const Failure& f) {
      r.detail = f.msg;
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.passed && r.seconds >= s.budget_seconds) {
      r.passed = false;
      r.detail += "; over the " + fmt(s.budget_seconds) + " s budget";
    }
    return r;
  };
  std::vector<CheckResult> results(specs.size());
  if (max_threads <= 1) {
    for (std::size_t i = 0; i < specs.size(); ++i) results[i] = run_one(specs[i]);
    return results;
  }
  std::size_t next = 0;
  while (next < specs.size()) {
    std::size_t batch = std::min<std::size_t>(max_threads, specs.size() - next);
    std::vector<std::future<CheckResult>> futs;
    for (std::size_t k = 0; k < batch; ++k) {
      const CheckSpec& s = specs[next + k];
      futs.push_back(std::async(std::launch::async, run_one, std::cref(s)));
    }
    for (std::size_t k = 0; k < batch; ++k) results[next + k] = futs[k].get();
    next += batch;
  }
  return results;
}

}  // namespace gimcf
