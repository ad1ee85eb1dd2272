#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <nlohmann/json.hpp>

#include "gimcf/model.hpp"

using namespace gimcf;
using std::numbers::pi;

namespace {
std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a * std::pow(b / a, double(i) / (n - 1));
  return v;
}
}  // namespace

TEST_CASE("unit sphere areas") {
  CHECK(unit_sphere_area(2) == doctest::Approx(2 * pi).epsilon(1e-14));
  CHECK(unit_sphere_area(3) == doctest::Approx(4 * pi).epsilon(1e-14));
  CHECK(unit_sphere_area(4) == doctest::Approx(2 * pi * pi).epsilon(1e-14));
}

TEST_CASE("sphere areas on closed-form models") {
  auto E3 = ModelManifold::euclidean(3);
  CHECK(sphere_area(E3, 1.0) == doctest::Approx(4 * pi).epsilon(1e-13));
  auto E2 = ModelManifold::euclidean(2);
  CHECK(sphere_area(E2, 2.0) == doctest::Approx(4 * pi).epsilon(1e-13));
  auto H2 = ModelManifold::hyperbolic(2, 1.0);
  CHECK(sphere_area(H2, 1.0) == doctest::Approx(2 * pi * std::sinh(1.0)).epsilon(1e-13));
  CHECK_THROWS_AS(sphere_area(E3, -1.0), std::domain_error);
  auto S2 = ModelManifold::spherical(2, 1.0, 3.0);
  CHECK_THROWS_AS(sphere_area(S2, 3.5), std::domain_error);
}

TEST_CASE("ball volumes") {
  auto E3 = ModelManifold::euclidean(3);
  CHECK(ball_volume(E3, 1.0) == doctest::Approx(4 * pi / 3).epsilon(1e-10));
  auto E2 = ModelManifold::euclidean(2);
  CHECK(ball_volume(E2, 1.0) == doctest::Approx(pi).epsilon(1e-10));
}

TEST_CASE("power-tail volume growth exponent") {
  auto P = ModelManifold::power_tail(2, 0.5, 1.0);
  // d log|B| / d log r -> 1 + alpha (n-1) = 1.5 in the tail
  double r = 100.0, dr = 1e-3 * r;
  double slope = (std::log(ball_volume(P, r + dr)) - std::log(ball_volume(P, r - dr))) /
                 (std::log(r + dr) - std::log(r - dr));
  CHECK(slope == doctest::Approx(1.5).epsilon(0.02));
  CHECK(P.volume_growth_exponent() == doctest::Approx(1.5));
}

TEST_CASE("mean curvature of geodesic spheres") {
  auto E3 = ModelManifold::euclidean(3);
  CHECK(mean_curvature_sphere(E3, 0.5) == doctest::Approx(4.0).epsilon(1e-14));
  auto H2 = ModelManifold::hyperbolic(2, 1.0);
  CHECK(mean_curvature_sphere(H2, 1.0) ==
        doctest::Approx(1.0 / std::tanh(1.0)).epsilon(1e-14));
  auto S2 = ModelManifold::spherical(2, 1.0, 3.0);
  CHECK(mean_curvature_sphere(S2, pi / 2) == doctest::Approx(0.0));
}

TEST_CASE("ball volume differentiates to sphere area") {
  auto models = {ModelManifold::euclidean(3), ModelManifold::hyperbolic(2, 1.0),
                 ModelManifold::power_tail(2, 0.5, 1.0)};
  for (const auto& M : models) {
    for (double r : {0.3, 1.0, 2.5}) {
      double d = 2e-5;
      double fd = (ball_volume(M, r + d) - ball_volume(M, r - d)) / (2 * d);
      CHECK(fd == doctest::Approx(sphere_area(M, r)).epsilon(1e-9));
    }
  }
}

TEST_CASE("sphere area non-decreasing when the warping is") {
  for (const auto& M : {ModelManifold::euclidean(2),
                        ModelManifold::power_tail(2, 0.5, 1.0),
                        ModelManifold::hyperbolic(3, 0.5)}) {
    auto grid = logspace(0.01, 50.0, 60);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      CHECK(sphere_area(M, grid[i]) >= sphere_area(M, grid[i - 1]));
    }
  }
}

TEST_CASE("power-tail blend keeps h' in (0, 1] and h continuous") {
  auto P = ModelManifold::power_tail(2, 0.5, 1.0);
  for (double r : logspace(0.01, 100.0, 200)) {
    double hp = P.warp_deriv(r);
    CHECK(hp > 0);
    CHECK(hp <= 1.0 + 1e-12);
  }
  // C^1 matching at both junction points
  for (double j : {0.5, 1.0}) {
    double lo = j * (1 - 1e-9), hi = j * (1 + 1e-9);
    CHECK(P.warp(lo) == doctest::Approx(P.warp(hi)).epsilon(1e-7));
    CHECK(P.warp_deriv(lo) == doctest::Approx(P.warp_deriv(hi)).epsilon(1e-6));
  }
  // tail coefficient: h = c r^alpha beyond r0
  CHECK(P.warp(4.0) == doctest::Approx(P.tail_coefficient() * 2.0).epsilon(1e-13));
}

TEST_CASE("pole behavior is enforced") {
  auto E3 = ModelManifold::euclidean(3);
  double r = 1e-6;
  CHECK(std::abs(E3.warp(r) / r - 1.0) < 1e-6);
  // a table that does not look euclidean at the pole is rejected
  std::vector<double> rr{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<double> hh{0.3, 0.5, 0.7, 0.9, 1.1};
  CHECK_THROWS_AS(ModelManifold::table(2, rr, hh), std::invalid_argument);
}

TEST_CASE("table models interpolate and differentiate") {
  std::vector<double> rr, hh;
  for (double r : logspace(1e-7, 3.0, 400)) {
    rr.push_back(r);
    hh.push_back(std::sinh(r));
  }
  auto T = ModelManifold::table(2, rr, hh);
  CHECK_FALSE(T.derivative_flagged());
  CHECK(T.warp(1.0) == doctest::Approx(std::sinh(1.0)).epsilon(1e-5));
  CHECK(T.warp_deriv(1.0) == doctest::Approx(std::cosh(1.0)).epsilon(5e-4));
  CHECK(mean_curvature_sphere(T, 1.0) ==
        doctest::Approx(1.0 / std::tanh(1.0)).epsilon(5e-4));

  // non-monotone table rejected
  std::vector<double> bad_h = hh;
  bad_h[200] = bad_h[199] * 0.5;
  CHECK_THROWS_AS(ModelManifold::table(2, rr, bad_h), std::invalid_argument);

  // a kink flags differentiation
  std::vector<double> kr, kh;
  for (double r : logspace(1e-7, 2.0, 80)) {
    kr.push_back(r);
    kh.push_back(r <= 1.0 ? r : 1.0 + 3.0 * (r - 1.0));
  }
  auto K = ModelManifold::table(2, kr, kh);
  CHECK(K.derivative_flagged());
  CHECK_THROWS_AS(mean_curvature_sphere(K, 1.5), std::domain_error);
}

TEST_CASE("spherical domain cap") {
  CHECK_THROWS_AS(ModelManifold::spherical(2, 1.0, 3.2), std::invalid_argument);
  CHECK_NOTHROW(ModelManifold::spherical(2, 1.0, 3.1));
}

TEST_CASE("diagnostics on the euclidean plane") {
  auto E2 = ModelManifold::euclidean(2);
  auto grid = logspace(0.1, 10.0, 16);
  auto d = diagnostics(E2, grid);
  CHECK(d.doubling_constant == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(d.doubling_dimension == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(d.rd_exponent == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(d.rd_constant == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(d.isoperimetric_constant == doctest::Approx(2 * std::sqrt(pi)).epsilon(1e-8));
}

TEST_CASE("diagnostics: power-tail reverse doubling exponent") {
  auto P = ModelManifold::power_tail(2, 0.5, 1.0);
  auto grid = logspace(20.0, 400.0, 12);
  auto d = diagnostics(P, grid);
  CHECK(d.rd_exponent == doctest::Approx(1.5).epsilon(0.02));
  // the fitted pair must satisfy the defining inequality on every grid pair
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i; j < grid.size(); ++j) {
      double lhs = ball_volume(P, grid[j]) / ball_volume(P, grid[i]);
      double rhs = d.rd_constant * std::pow(grid[j] / grid[i], d.rd_exponent);
      CHECK(lhs >= rhs * (1 - 1e-12));
    }
  }
}

TEST_CASE("diagnostics: hyperbolic doubling diverges with the grid") {
  auto H2 = ModelManifold::hyperbolic(2, 1.0);
  auto d_small = diagnostics(H2, logspace(1.0, 5.0, 10));
  auto d_big = diagnostics(H2, logspace(1.0, 10.0, 10));
  CHECK(d_big.doubling_constant > 2 * d_small.doubling_constant);
  CHECK(d_small.doubling_constant > 16.0);  // far beyond any 2^n
}

TEST_CASE("diagnostics input validation") {
  auto E2 = ModelManifold::euclidean(2);
  std::vector<double> tiny{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(diagnostics(E2, tiny), std::invalid_argument);
  auto S2 = ModelManifold::spherical(2, 1.0, 3.0);
  auto grid = logspace(0.5, 2.0, 10);  // doubled radii leave the domain
  CHECK_THROWS_AS(diagnostics(S2, grid), std::invalid_argument);
}

TEST_CASE("model JSON round trip") {
  auto P = ModelManifold::power_tail(3, 0.7, 2.0, kInf, 1e-9);
  auto j = P.to_json();
  auto Q = ModelManifold::from_json(j);
  CHECK(Q.dim() == 3);
  CHECK(Q.alpha() == doctest::Approx(0.7));
  CHECK(Q.warp(5.0) == doctest::Approx(P.warp(5.0)).epsilon(1e-15));

  auto j2 = nlohmann::json::parse(R"({"kind":"hyperbolic","n":2,"kappa":1.0})");
  auto H = ModelManifold::from_json(j2);
  CHECK(H.kind() == WarpKind::Hyperbolic);
  CHECK(H.r_max() == kInf);
  CHECK_THROWS(ModelManifold::from_json(
      nlohmann::json::parse(R"({"kind":"nope","n":2})")));
}
