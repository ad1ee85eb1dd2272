#include "gimcf/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "gimcf/interp.hpp"
#include "gimcf/quadrature.hpp"

namespace gimcf {

double unit_sphere_area(int n) {
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

namespace {
void check_common(int n, double r_max, double tol) {
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  if (!(r_max > 0)) throw std::invalid_argument("r_max must be positive");
  if (!(tol > 0)) throw std::invalid_argument("quadrature_tol must be positive");
}
}  // namespace

ModelManifold ModelManifold::euclidean(int n, double r_max, double quad_tol) {
  check_common(n, r_max, quad_tol);
  ModelManifold m;
  m.kind_ = WarpKind::Euclidean;
  m.n_ = n;
  m.rmax_ = r_max;
  m.qtol_ = quad_tol;
  m.omega_ = gimcf::unit_sphere_area(n);
  return m;
}

ModelManifold ModelManifold::hyperbolic(int n, double kappa, double r_max,
                                        double quad_tol) {
  check_common(n, r_max, quad_tol);
  if (!(kappa > 0)) throw std::invalid_argument("hyperbolic: kappa must be > 0");
  ModelManifold m;
  m.kind_ = WarpKind::Hyperbolic;
  m.n_ = n;
  m.kappa_ = kappa;
  m.rmax_ = r_max;
  m.qtol_ = quad_tol;
  m.omega_ = gimcf::unit_sphere_area(n);
  return m;
}

ModelManifold ModelManifold::spherical(int n, double kappa, double r_max,
                                       double quad_tol) {
  check_common(n, r_max, quad_tol);
  if (!(kappa > 0)) throw std::invalid_argument("spherical: kappa must be > 0");
  if (!(r_max < std::numbers::pi / kappa)) {
    throw std::invalid_argument("spherical: r_max must be < pi/kappa");
  }
  ModelManifold m;
  m.kind_ = WarpKind::Spherical;
  m.n_ = n;
  m.kappa_ = kappa;
  m.rmax_ = r_max;
  m.qtol_ = quad_tol;
  m.omega_ = gimcf::unit_sphere_area(n);
  return m;
}

ModelManifold ModelManifold::power_tail(int n, double alpha, double r0,
                                        double r_max, double quad_tol) {
  check_common(n, r_max, quad_tol);
  if (!(alpha > 0)) throw std::invalid_argument("power_tail: alpha must be > 0");
  if (!(r0 > 0) || r0 >= r_max) {
    throw std::invalid_argument("power_tail: need 0 < r0 < r_max");
  }
  ModelManifold m;
  m.kind_ = WarpKind::PowerTail;
  m.n_ = n;
  m.alpha_ = alpha;
  m.r0_ = r0;
  m.tail_c_ = std::pow(r0 / std::numbers::sqrt2, 1.0 - alpha);
  m.rmax_ = r_max;
  m.qtol_ = quad_tol;
  m.omega_ = gimcf::unit_sphere_area(n);
  m.breaks_ = {0.5 * r0, r0};
  return m;
}

ModelManifold ModelManifold::table(int n, std::vector<double> r,
                                   std::vector<double> h, double quad_tol) {
  if (r.size() != h.size() || r.size() < 4) {
    throw std::invalid_argument("table: need >= 4 samples");
  }
  check_common(n, r.back(), quad_tol);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0) || !(h[i] > 0)) {
      throw std::invalid_argument("table: samples must be positive");
    }
    if (i && !(r[i] > r[i - 1] && h[i] > h[i - 1])) {
      throw std::invalid_argument("table: samples must be strictly increasing");
    }
  }
  ModelManifold m;
  m.kind_ = WarpKind::Table;
  m.n_ = n;
  m.rmax_ = r.back();
  m.qtol_ = quad_tol;
  m.omega_ = gimcf::unit_sphere_area(n);
  m.tr_ = std::move(r);
  m.th_ = std::move(h);
  // Node derivatives: centered second-order differences (secant blend exact
  // on quadratics), one-sided second-order closures at the ends.
  const std::size_t N = m.tr_.size();
  std::vector<double> sec(N - 1);
  for (std::size_t i = 0; i + 1 < N; ++i) {
    sec[i] = (m.th_[i + 1] - m.th_[i]) / (m.tr_[i + 1] - m.tr_[i]);
  }
  m.tm_.resize(N);
  for (std::size_t i = 1; i + 1 < N; ++i) {
    double dl = m.tr_[i] - m.tr_[i - 1], dr = m.tr_[i + 1] - m.tr_[i];
    m.tm_[i] = (dr * sec[i - 1] + dl * sec[i]) / (dl + dr);
  }
  {
    double h0 = m.tr_[1] - m.tr_[0], h1 = m.tr_[2] - m.tr_[1];
    m.tm_[0] = ((2 * h0 + h1) * sec[0] - h0 * sec[1]) / (h0 + h1);
    double g0 = m.tr_[N - 1] - m.tr_[N - 2], g1 = m.tr_[N - 2] - m.tr_[N - 3];
    m.tm_[N - 1] =
        ((2 * g0 + g1) * sec[N - 2] - g0 * sec[N - 3]) / (g0 + g1);
  }
  for (std::size_t i = 1; i + 1 < N; ++i) {
    if (std::abs(sec[i] - sec[i - 1]) >
        0.3 * std::max(std::abs(sec[i]), std::abs(sec[i - 1])) + 1e-14) {
      m.deriv_flag_ = true;
    }
  }
  m.breaks_ = m.tr_;
  m.validate_pole();
  return m;
}

void ModelManifold::validate_pole() const {
  double probe = 1e-6 * std::min(rmax_, 1.0);
  double ratio = warp(probe) / probe;
  if (std::abs(ratio - 1.0) >= 1e-6) {
    throw std::invalid_argument("warping does not resolve the pole: h(r)/r = " +
                                std::to_string(ratio) + " at r = " +
                                std::to_string(probe));
  }
}

double ModelManifold::warp(double r) const {
  switch (kind_) {
    case WarpKind::Euclidean:
      return r;
    case WarpKind::Hyperbolic:
      return std::sinh(kappa_ * r) / kappa_;
    case WarpKind::Spherical:
      return std::sin(kappa_ * r) / kappa_;
    case WarpKind::PowerTail: {
      if (r <= 0.5 * r0_) return r;
      if (r >= r0_) return tail_c_ * std::pow(r, alpha_);
      double l = std::log(r), l0 = std::log(0.5 * r0_);
      double D = std::numbers::ln2;
      return std::exp(l + (alpha_ - 1.0) * (l - l0) * (l - l0) / (2.0 * D));
    }
    case WarpKind::Table: {
      if (r < tr_.front()) return r * (th_.front() / tr_.front());
      return hermite_eval(tr_, th_, tm_, r);
    }
  }
  return 0;
}

double ModelManifold::warp_deriv(double r) const {
  switch (kind_) {
    case WarpKind::Euclidean:
      return 1.0;
    case WarpKind::Hyperbolic:
      return std::cosh(kappa_ * r);
    case WarpKind::Spherical:
      return std::cos(kappa_ * r);
    case WarpKind::PowerTail: {
      if (r <= 0.5 * r0_) return 1.0;
      if (r >= r0_) return tail_c_ * alpha_ * std::pow(r, alpha_ - 1.0);
      double l = std::log(r), l0 = std::log(0.5 * r0_);
      double D = std::numbers::ln2;
      double sigma = 1.0 + (alpha_ - 1.0) * (l - l0) / D;
      return warp(r) / r * sigma;
    }
    case WarpKind::Table: {
      if (r < tr_.front()) return th_.front() / tr_.front();
      double d = 0;
      hermite_eval(tr_, th_, tm_, r, &d);
      return d;
    }
  }
  return 0;
}

bool ModelManifold::nondecreasing_on(double a, double b) const {
  if (!(a <= b)) return true;
  switch (kind_) {
    case WarpKind::Euclidean:
    case WarpKind::Hyperbolic:
    case WarpKind::PowerTail:
      return true;
    case WarpKind::Spherical:
      return b <= 0.5 * std::numbers::pi / kappa_ + 1e-15;
    case WarpKind::Table: {
      for (std::size_t i = 0; i + 1 < tr_.size(); ++i) {
        if (tr_[i + 1] < a || tr_[i] > b) continue;
        if (th_[i + 1] < th_[i]) return false;
      }
      return true;  // strict monotonicity enforced at construction
    }
  }
  return false;
}

bool ModelManifold::green_tail_converges(double p) const {
  if (!(p > 1)) throw std::invalid_argument("need p > 1");
  if (rmax_ != kInf) {
    throw std::logic_error("green_tail_converges: domain radius is finite");
  }
  switch (kind_) {
    case WarpKind::Euclidean:
      return p < double(n_);
    case WarpKind::Hyperbolic:
      return true;  // v_h^{-1/(p-1)} decays exponentially
    case WarpKind::PowerTail:
      return p < volume_growth_exponent();
    default:
      throw std::logic_error("green_tail_converges: tail form unknown");
  }
}

double ModelManifold::volume_growth_exponent() const {
  switch (kind_) {
    case WarpKind::Euclidean:
      return double(n_);
    case WarpKind::PowerTail:
      return 1.0 + alpha_ * double(n_ - 1);
    default:
      throw std::logic_error("volume growth exponent: tail is not power-like");
  }
}

double ModelManifold::tail_coefficient() const {
  if (kind_ != WarpKind::PowerTail) {
    throw std::logic_error("tail_coefficient: not a power-tail model");
  }
  return tail_c_;
}

std::string ModelManifold::id() const {
  std::ostringstream os;
  switch (kind_) {
    case WarpKind::Euclidean: os << "euclidean(n=" << n_ << ")"; break;
    case WarpKind::Hyperbolic:
      os << "hyperbolic(n=" << n_ << ",kappa=" << kappa_ << ")"; break;
    case WarpKind::Spherical:
      os << "spherical(n=" << n_ << ",kappa=" << kappa_ << ")"; break;
    case WarpKind::PowerTail:
      os << "power_tail(n=" << n_ << ",alpha=" << alpha_ << ",r0=" << r0_ << ")";
      break;
    case WarpKind::Table: os << "table(n=" << n_ << "," << tr_.size() << " pts)";
      break;
  }
  return os.str();
}

ModelManifold ModelManifold::from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  int n = j.at("n").get<int>();
  double tol = j.value("quadrature_tol", 1e-10);
  double rmax = kInf;
  if (j.contains("r_max") && j["r_max"].is_number()) {
    rmax = j["r_max"].get<double>();
  }
  if (kind == "euclidean") return euclidean(n, rmax, tol);
  if (kind == "hyperbolic") return hyperbolic(n, j.at("kappa").get<double>(), rmax, tol);
  if (kind == "spherical") {
    if (rmax == kInf) throw std::invalid_argument("spherical: r_max required");
    return spherical(n, j.at("kappa").get<double>(), rmax, tol);
  }
  if (kind == "power_tail") {
    return power_tail(n, j.at("alpha").get<double>(), j.at("r0").get<double>(),
                      rmax, tol);
  }
  if (kind == "table") {
    std::vector<double> r, h;
    for (const auto& row : j.at("samples")) {
      r.push_back(row.at(0).get<double>());
      h.push_back(row.at(1).get<double>());
    }
    return table(n, std::move(r), std::move(h), tol);
  }
  throw std::invalid_argument("unknown model kind: " + kind);
}

ModelManifold ModelManifold::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json ModelManifold::to_json() const {
  nlohmann::json j;
  j["n"] = n_;
  j["quadrature_tol"] = qtol_;
  if (rmax_ != kInf) j["r_max"] = rmax_;
  switch (kind_) {
    case WarpKind::Euclidean: j["kind"] = "euclidean"; break;
    case WarpKind::Hyperbolic: j["kind"] = "hyperbolic"; j["kappa"] = kappa_; break;
    case WarpKind::Spherical: j["kind"] = "spherical"; j["kappa"] = kappa_; break;
    case WarpKind::PowerTail:
      j["kind"] = "power_tail"; j["alpha"] = alpha_; j["r0"] = r0_; break;
    case WarpKind::Table: {
      j["kind"] = "table";
      auto rows = nlohmann::json::array();
      for (std::size_t i = 0; i < tr_.size(); ++i) {
        rows.push_back({tr_[i], th_[i]});
      }
      j["samples"] = rows;
      break;
    }
  }
  return j;
}

namespace {
void check_radius(const ModelManifold& M, double r) {
  if (!(r > 0) || !(r < M.r_max())) {
    throw std::domain_error("radius out of domain (0, r_max)");
  }
}
}  // namespace

double sphere_area(const ModelManifold& M, double r) {
  check_radius(M, r);
  return M.unit_sphere_area() * std::pow(M.warp(r), M.dim() - 1);
}

double ball_volume(const ModelManifold& M, double r) {
  check_radius(M, r);
  return integrate_split([&](double s) { return sphere_area(M, s); }, 0.0, r,
                         M.quadrature_tol(), M.smoothness_breaks());
}

double mean_curvature_sphere(const ModelManifold& M, double r) {
  check_radius(M, r);
  if (M.kind() == WarpKind::Table && M.derivative_flagged()) {
    throw std::domain_error(
        "sample table is too rough to differentiate (slope jumps detected)");
  }
  return (M.dim() - 1) * M.warp_deriv(r) / M.warp(r);
}

GeometryDiagnostics diagnostics(const ModelManifold& M,
                                std::span<const double> grid) {
  if (grid.size() < 8) throw std::invalid_argument("diagnostics: need >= 8 radii");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0) || (i && !(grid[i] > grid[i - 1]))) {
      throw std::invalid_argument("diagnostics: grid must be positive and increasing");
    }
  }
  if (!(2 * grid.back() < M.r_max())) {
    throw std::invalid_argument("diagnostics: doubled radii leave the domain");
  }
  const std::size_t m = grid.size();
  std::vector<double> vol(m), vol2(m), logr(m), logv(m);
  for (std::size_t i = 0; i < m; ++i) {
    vol[i] = ball_volume(M, grid[i]);
    vol2[i] = ball_volume(M, 2 * grid[i]);
    logr[i] = std::log(grid[i]);
    logv[i] = std::log(vol[i]);
  }
  GeometryDiagnostics d{};
  d.doubling_constant = 0;
  for (std::size_t i = 0; i < m; ++i) {
    d.doubling_constant = std::max(d.doubling_constant, vol2[i] / vol[i]);
  }
  d.doubling_dimension = std::log2(d.doubling_constant);
  d.rd_exponent = lsq_slope(logr, logv);
  d.rd_constant = kInf;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      double c = (vol[j] / vol[i]) * std::pow(grid[i] / grid[j], d.rd_exponent);
      d.rd_constant = std::min(d.rd_constant, c);
    }
  }
  const double ex = double(M.dim() - 1) / double(M.dim());
  d.isoperimetric_constant = kInf;
  for (std::size_t i = 0; i < m; ++i) {
    double c = sphere_area(M, grid[i]) / std::pow(vol[i], ex);
    d.isoperimetric_constant = std::min(d.isoperimetric_constant, c);
  }
  return d;
}

}  // namespace gimcf
