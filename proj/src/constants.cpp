#include "gimcf/constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gimcf/model.hpp"
#include "gimcf/quadrature.hpp"

namespace gimcf {

namespace {
void need_p_nu(double p, double nu) {
  if (!(p > 1) || !(nu > p)) throw std::invalid_argument("need 1 < p < nu");
}

// Kahan-compensated accumulator.
struct Kahan {
  double s = 0, c = 0;
  void add(double x) {
    double y = x - c, t = s + y;
    c = (t - s) - y;
    s = t;
  }
};
}  // namespace

double cbar(double p, double nu) {
  need_p_nu(p, nu);
  return std::pow(2.0, nu) * std::pow(1.0 + p, p);
}

double c_harnack(double p, double nu) {
  need_p_nu(p, nu);
  double a = std::pow(1.0 + p, p);
  double b = std::pow(3.0, p) * std::pow(nu, nu) /
             (std::pow(p, p) * std::pow(nu - p, nu - p));
  return std::pow(2.0, nu) * std::max(a, b);
}

double chat(double p, double nu, double S) {
  need_p_nu(p, nu);
  if (S < 0) throw std::invalid_argument("chat: S must be >= 0");
  return std::pow(S, nu / p) * std::pow(2.0, (nu + 2 * p) * (nu - p) / p);
}

double c_unstable(double p, double nu, double S) {
  need_p_nu(p, nu);
  if (S < 0) throw std::invalid_argument("c_unstable: S must be >= 0");
  return std::pow(S, nu / p) * std::pow(cbar(p, nu), (nu - p) / p) *
         std::pow(std::numbers::e * p, nu - p) / std::pow(p - 1.0, nu - p);
}

SobolevLocal sobolev_local(int n, double p, double kappa, double R,
                           double vol_BR, double c_n, double C_n) {
  if (n < 2 || !(p > 0) || !(p < n)) {
    throw std::invalid_argument("sobolev_local: need 0 < p < n");
  }
  if (kappa < 0 || !(R > 0) || !(vol_BR > 0)) {
    throw std::invalid_argument("sobolev_local: bad geometry inputs");
  }
  double omega = unit_sphere_area(n);
  auto v_kappa = [&](double t) {
    double w = kappa == 0 ? t : std::sinh(kappa * t) / kappa;
    return omega * std::pow(w, n - 1);
  };
  auto V_kappa = [&](double t) {
    if (kappa == 0) return omega / n * std::pow(t, n);
    return integrate(v_kappa, 0.0, t, 1e-10);
  };
  SobolevLocal out{};
  out.P_pp = std::exp(c_n * (1.0 + kappa * R) / p);
  double P_11 = std::exp(c_n * (1.0 + kappa * R));
  out.S_1n = C_n * V_kappa(2 * R) / vol_BR *
             (P_11 + V_kappa(3 * R) / (R * v_kappa(R)));
  out.S_pn = std::pow(out.S_1n * p * (n - 1) / (n - p), p);
  return out;
}

double harnack_chaining_log(double C, double sigma, double nu, double p0,
                            double P_1p, double S) {
  if (!(sigma >= 1) || !(nu > p0) || !(p0 > 0)) {
    throw std::invalid_argument("harnack_chaining_log: bad arguments");
  }
  return C * std::pow(sigma, nu * (1.0 + 2.0 * nu / (nu - p0))) * P_1p *
         std::pow(std::max(1.0, S), 2.0 * nu * nu / (nu - p0));
}

double harnack_q(double S, double C_pnu, double R, double vol, double nu,
                 double p) {
  need_p_nu(p, nu);
  double g = -(nu / p) * std::log(S * C_pnu) + nu * std::log(R) - std::log(vol);
  double tau = g >= 0 ? 1.0 : nu / (nu - p);
  return std::exp(tau * g);
}

void IterationSchedule::validate() const {
  if (x.size() < 16) throw std::invalid_argument("schedule: need K >= 16");
  if (!(t0 > 0)) throw std::invalid_argument("schedule: t0 must be positive");
  Kahan sum;
  for (double xk : x) {
    if (!(xk > 0)) throw std::invalid_argument("schedule: decrements must be > 0");
    sum.add(xk);
    if (sum.s > t0 * (1 + 1e-12)) {
      throw std::invalid_argument("schedule: decrements exhaust t0");
    }
  }
}

IterationSchedule optimal_schedule(double t0, double p, int K) {
  if (!(t0 > 0) || !(p > 1) || K < 16) {
    throw std::invalid_argument("optimal_schedule: bad arguments");
  }
  IterationSchedule s;
  s.t0 = t0;
  s.x.resize(K);
  double f = t0 * (p - 1.0) / p;
  for (int k = 0; k < K; ++k) s.x[k] = f * std::pow(p, -k);
  return s;
}

double iterate_log_bound(const IterationSchedule& s, double chat_value,
                         double p, double nu, double tail_value) {
  s.validate();
  need_p_nu(p, nu);
  if (!(chat_value > 0) || !(tail_value > 0)) {
    throw std::invalid_argument("iterate: chat and tail must be positive");
  }
  Kahan sum_w, sum_wx;  // sum p^-k and sum p^-k log x_k
  double w = 1.0;
  for (double xk : s.x) {
    sum_w.add(w);
    sum_wx.add(w * std::log(xk));
    w /= p;
  }
  return sum_w.s * std::log(chat_value) - (nu - p) / p * sum_wx.s +
         w * std::log(tail_value);
}

double geometric_bound_log(double t0, double chat_value, double p, double nu) {
  need_p_nu(p, nu);
  if (!(t0 > 0) || !(chat_value > 0)) {
    throw std::invalid_argument("geometric_bound_log: bad arguments");
  }
  return p / (p - 1.0) * std::log(chat_value) -
         (nu - p) / p * optimal_log_product(t0, p);
}

double optimal_log_product(double t0, double p) {
  if (!(t0 > 0) || !(p > 1)) {
    throw std::invalid_argument("optimal_log_product: bad arguments");
  }
  return p / (p - 1.0) * std::log((p - 1.0) * t0 / p) -
         p / ((p - 1.0) * (p - 1.0)) * std::log(p);
}

namespace {
// Largest p in (1, p_hi] satisfying cond, by bisection; p_hi when cond holds
// there, 1 when it fails arbitrarily close to 1.
double bisect_threshold(const std::function<bool(double)>& cond, double p_hi) {
  if (cond(p_hi)) return p_hi;
  double lo = 1.0 + 1e-13;
  if (!cond(lo)) return 1.0;
  double hi = p_hi;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (cond(mid)) lo = mid; else hi = mid;
  }
  return lo;
}
}  // namespace

NogoReport nogo_certificate(double A, double B, double t0,
                            std::span<const double> p_grid) {
  if (!(A > 0) || B < 0 || !(t0 > 0)) {
    throw std::invalid_argument("nogo_certificate: need A, t0 > 0 and B >= 0");
  }
  NogoReport rep{};
  const double scale = std::exp(B + 2.0);
  const double m = std::ceil(scale * t0);  // integer count threshold
  rep.t0_rounded = m / scale;
  const double rhs_budget =
      (m + 1.0) * std::log(std::max(1.0, rep.t0_rounded)) - std::log(A);
  auto cond_count = [&](double p) {
    return (B + 1.0) * std::pow(p, -m) > B;
  };
  auto cond_budget = [&](double p) {
    return std::pow(p, -m) / (p - 1.0) > rhs_budget;
  };
  const double p_hi = 16.0;
  rep.p0_count_cond = bisect_threshold(cond_count, p_hi);
  rep.p0_budget_cond = bisect_threshold(cond_budget, p_hi);
  rep.p0 = std::min(rep.p0_count_cond, rep.p0_budget_cond);
  for (double p : p_grid) {
    if (!(p > 1)) throw std::invalid_argument("nogo_certificate: grid needs p > 1");
    if (p > rep.p0) {
      std::string which =
          p > rep.p0_count_cond
              ? "(B+1) p^-m > B fails"
              : "p^-m/(p-1) > (m+1) log max(1,t0) - log A fails";
      throw std::invalid_argument(
          "nogo_certificate: p = " + std::to_string(p) +
          " exceeds the admissible threshold p0 = " + std::to_string(rep.p0) +
          ": " + which);
    }
    NogoReport::Point pt{};
    pt.p = p;
    pt.log_target = std::log(A) - B / (p - 1.0);
    pt.log_max_product = optimal_log_product(t0, p);
    pt.margin = pt.log_target - pt.log_max_product;
    rep.points.push_back(pt);
  }
  return rep;
}

BlowupReport classify_blowup(const std::function<double(double)>& c_of_p,
                             std::span<const double> p_grid) {
  if (p_grid.size() < 6) {
    throw std::invalid_argument("classify_blowup: need >= 6 grid points");
  }
  // Sort by t = 1/(p-1) ascending (p descending toward 1 at the end).
  std::vector<double> ps(p_grid.begin(), p_grid.end());
  std::sort(ps.begin(), ps.end(), std::greater<>());
  std::vector<double> t(ps.size()), y(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!(ps[i] > 1) || ps[i] > 1.5) {
      throw std::invalid_argument("classify_blowup: grid must lie in (1, 1.5]");
    }
    t[i] = 1.0 / (ps[i] - 1.0);
    y[i] = std::log(c_of_p(ps[i]));
    if (!std::isfinite(y[i])) {
      throw std::domain_error("classify_blowup: constant not finite on grid");
    }
  }
  const std::size_t k = ps.size() - 1;
  double d_last = (y[k] - y[k - 1]) / (std::log(t[k]) - std::log(t[k - 1]));
  double d_prev = (y[k - 1] - y[k - 2]) / (std::log(t[k - 1]) - std::log(t[k - 2]));
  double e_last = (y[k] - y[k - 1]) / (t[k] - t[k - 1]);
  double e_prev = (y[k - 1] - y[k - 2]) / (t[k - 1] - t[k - 2]);
  BlowupReport out{};
  bool exp_stable = std::abs(e_last - e_prev) <= 0.05 * std::abs(e_last) + 1e-12;
  if (exp_stable && std::abs(e_last) > 1e-3) {
    out.kind = Blowup::Exponential;
    out.fitted_exponent = e_last;
    return out;
  }
  bool poly_stable =
      std::abs(d_last - d_prev) <= 0.1 * std::max(1.0, std::abs(d_last));
  if (poly_stable && std::abs(d_last) > 0.05) {
    out.kind = Blowup::Polynomial;
    out.fitted_exponent = d_last;
    return out;
  }
  out.kind = Blowup::Bounded;
  out.fitted_exponent = 0;
  return out;
}

std::string blowup_name(Blowup b) {
  switch (b) {
    case Blowup::Bounded: return "bounded";
    case Blowup::Polynomial: return "polynomial";
    case Blowup::Exponential: return "exponential";
  }
  return "?";
}

std::vector<ConstantsRow> constants_report(std::span<const double> p_grid,
                                           double nu, double S) {
  struct Entry {
    const char* id;
    std::function<double(double)> f;
  };
  std::vector<Entry> entries{
      {"cbar", [nu](double p) { return cbar(p, nu); }},
      {"c_harnack", [nu](double p) { return c_harnack(p, nu); }},
      {"chat", [nu, S](double p) { return chat(p, nu, S); }},
      {"c_unstable", [nu, S](double p) { return c_unstable(p, nu, S); }},
  };
  std::vector<ConstantsRow> rows;
  for (const auto& e : entries) {
    std::string cls = blowup_name(classify_blowup(e.f, p_grid).kind);
    for (double p : p_grid) {
      rows.push_back({p, e.id, e.f(p), cls});
    }
  }
  return rows;
}

}  // namespace gimcf
