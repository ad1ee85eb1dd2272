#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace gimcf {

// Fritsch-Carlson slopes for a monotone cubic (PCHIP) through (x_i, y_i),
// x strictly increasing. The resulting Hermite interpolant preserves
// monotonicity of the data.
inline std::vector<double> pchip_slopes(std::span<const double> x,
                                        std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("pchip: bad data");
  std::vector<double> d(n - 1), m(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double dx = x[i + 1] - x[i];
    if (!(dx > 0)) throw std::invalid_argument("pchip: x not increasing");
    d[i] = (y[i + 1] - y[i]) / dx;
  }
  if (n == 2) {
    m[0] = m[1] = d[0];
    return m;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0) {
      m[i] = 0;
    } else {
      double w1 = 2 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
      double w2 = (x[i + 1] - x[i]) + 2 * (x[i] - x[i - 1]);
      m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0) return 0.0;
    if (d0 * d1 <= 0 && std::abs(s) > 3 * std::abs(d0)) return 3 * d0;
    return s;
  };
  m[0] = end_slope(x[1] - x[0], x[2] - x[1], d[0], d[1]);
  m[n - 1] = end_slope(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], d[n - 2], d[n - 3]);
  return m;
}

// Hermite evaluation on the interval containing xq (clamped to the data range).
inline double hermite_eval(std::span<const double> x, std::span<const double> y,
                           std::span<const double> m, double xq,
                           double* deriv = nullptr) {
  const std::size_t n = x.size();
  std::size_t i = 0;
  if (xq >= x[n - 2]) {
    i = n - 2;
  } else {
    std::size_t lo = 0, hi = n - 2;
    while (lo < hi) {
      std::size_t mid = (lo + hi + 1) / 2;
      if (x[mid] <= xq) lo = mid; else hi = mid - 1;
    }
    i = lo;
  }
  double h = x[i + 1] - x[i], t = (xq - x[i]) / h;
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  double v = h00 * y[i] + h * h10 * m[i] + h01 * y[i + 1] + h * h11 * m[i + 1];
  if (deriv) {
    double g00 = 6 * t * (t - 1), g10 = (1 - t) * (1 - 3 * t);
    double g01 = -g00, g11 = t * (3 * t - 2);
    *deriv = (g00 * y[i] + h * g10 * m[i] + g01 * y[i + 1] + h * g11 * m[i + 1]) / h;
  }
  return v;
}

// Least-squares slope of y against x.
inline double lsq_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("lsq_slope: bad data");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
  mx /= double(n); my /= double(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace gimcf
