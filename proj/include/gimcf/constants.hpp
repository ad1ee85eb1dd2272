#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gimcf {

// Explicit constants of the supremum / Harnack / decay estimates, as
// functions of the exponent p and the Sobolev dimension nu.

// 2^nu (1+p)^p
double cbar(double p, double nu);
// 2^nu max{ (1+p)^p, 3^p nu^nu / (p^p (nu-p)^(nu-p)) }
double c_harnack(double p, double nu);
// S^(nu/p) 2^((nu+2p)(nu-p)/p); bounded as p -> 1 when S is.
double chat(double p, double nu, double S);
// S^(nu/p) cbar^((nu-p)/p) (e p)^(nu-p) / (p-1)^(nu-p); blows up as p -> 1.
double c_unstable(double p, double nu, double S);

struct SobolevLocal {
  double P_pp;   // local (p,p)-Poincare constant
  double S_1n;   // local L^1 Sobolev constant
  double S_pn;   // local L^p Sobolev constant
};

// Local constants under Ric >= -(n-1) kappa^2 on a ball of radius R with
// volume vol_BR. The dimensional factors c_n, C_n have no numeric value in
// the estimates they come from; they are configuration with default 1.
SobolevLocal sobolev_local(int n, double p, double kappa, double R,
                           double vol_BR, double c_n = 1, double C_n = 1);

// Harnack chaining constant, log form:
// log H = C sigma^(nu (1 + 2 nu/(nu-p0))) P_1p max(1,S)^(2 nu^2/(nu-p0)).
// C and the annuli-connectedness bound sigma are user inputs.
double harnack_chaining_log(double C, double sigma, double nu, double p0,
                            double P_1p, double S);

// Q = inf over tau in [1, nu/(nu-p)] of (S C_pnu)^(-nu tau / p) R^(nu tau)
// vol^(-tau); the infimum of an exponential in tau sits at an endpoint.
double harnack_q(double S, double C_pnu, double R, double vol, double nu,
                 double p);

// Supremum-bound iteration over a decreasing radius sequence encoded by its
// decrements x_k (t_k = t0 - sum_{j<k} x_j).
struct IterationSchedule {
  double t0 = 1;
  std::vector<double> x;
  void validate() const;  // x_k > 0, partial sums <= t0, K >= 16
};

// Stationary (product-maximizing) schedule: x_k = t0 (p-1)/p p^{-k}.
IterationSchedule optimal_schedule(double t0, double p, int K);

// log of the iterated bound
//   chat^(sum p^-k) [prod x_k^(p^-k)]^(-(nu-p)/p) tail^(p^-K),
// accumulated with compensated summation.
double iterate_log_bound(const IterationSchedule& s, double chat_value,
                         double p, double nu, double tail_value);

// Closed form of the iterated bound for the geometric schedule t_k = t0/p^k,
// K -> inf, tail factor 1 (log form).
double geometric_bound_log(double t0, double chat_value, double p, double nu);

// log of prod_k x_k^(p^-k) for the stationary schedule (its maximum value
// over all admissible schedules):
//   (p/(p-1)) log((p-1) t0 / p) - p/(p-1)^2 log p.
double optimal_log_product(double t0, double p);

struct NogoReport {
  double p0;              // admissible threshold: min of the two conditions
  double p0_count_cond;   // largest p with (B+1) p^-m > B
  double p0_budget_cond;  // largest p with p^-m/(p-1) > (m+1) log max(1,t0') - log A
  double t0_rounded;      // t0 increased so that e^(B+2) t0 is an integer
  struct Point {
    double p;
    double log_target;    // log A - B/(p-1)
    double log_max_product;
    double margin;        // log_target - log_max_product
  };
  std::vector<Point> points;
};

// Certifies that no schedule survives the p -> 1 limit: for every p in the
// grid (which must sit inside (1, p0]) the best possible product falls short
// of A e^(-B/(p-1)), with the margin reported in log space.
NogoReport nogo_certificate(double A, double B, double t0,
                            std::span<const double> p_grid);

enum class Blowup { Bounded, Polynomial, Exponential };

struct BlowupReport {
  Blowup kind;
  double fitted_exponent;  // degree in 1/(p-1) (polynomial) or rate (exponential)
};

// Classifies c(p) as p -> 1 from log-slopes against log(1/(p-1)) and
// 1/(p-1). Grid must have >= 6 points in (1, 1.5], log-spaced in p-1.
BlowupReport classify_blowup(const std::function<double(double)>& c_of_p,
                             std::span<const double> p_grid);

std::string blowup_name(Blowup b);

struct ConstantsRow {
  double p;
  std::string constant_id;
  double value;
  std::string classification;
};

// Evaluates the ledger on a p-grid and classifies each constant's p -> 1
// behavior (with S held fixed).
std::vector<ConstantsRow> constants_report(std::span<const double> p_grid,
                                           double nu, double S);

}  // namespace gimcf
