#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "coin.hpp"
#include "walker.hpp"

namespace dcqw {

enum class Mode { center, right, left };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::center: return "center";
    case Mode::right: return "right";
    case Mode::left: return "left";
  }
  return "?";
}

// Gaussian in y = (x - speed n) / sqrt(n).
struct LimitProfile {
  Mode mode = Mode::center;
  double weight = 0.5;
  double speed = 0.0;
  double variance = 0.5;
};

struct LimitCoefficients {
  cplx minus, zero, plus;
  bool complex_valued = false;  // Im(conj(g1) g2) != 0
};

// c_pm = ((2 -+ sqrt3)|g1|^2 + (1 -+ sqrt3) conj(g1) g2 + |g2|^2) / (2 (3 -+ sqrt3)), c_0 = 1/2
inline LimitCoefficients limit_coefficients(const Vec2& g) {
  check_unit(g);
  const double s3 = std::sqrt(3.0);
  const cplx cross = std::conj(g(0)) * g(1);
  const double g1 = std::norm(g(0)), g2 = std::norm(g(1));
  LimitCoefficients c;
  c.plus = ((2 - s3) * g1 + (1 - s3) * cross + g2) / (2 * (3 - s3));
  c.minus = ((2 + s3) * g1 + (1 + s3) * cross + g2) / (2 * (3 + s3));
  c.zero = 0.5;
  c.complex_valued = std::abs(cross.imag()) > 1e-14;
  return c;
}

inline std::vector<LimitProfile> three_mode_profiles(const Vec2& g, double side_variance = 4.0 / 9.0) {
  const auto c = limit_coefficients(g);
  const double v = 1 / std::sqrt(3.0);
  return {{Mode::center, c.zero.real(), 0.0, 0.5},
          {Mode::right, c.plus.real(), v, side_variance},
          {Mode::left, c.minus.real(), -v, side_variance}};
}

// Weak-limit density of the 1D walk with |a| = abs_a; Hadamard: 1 / (pi (1 - x^2) sqrt(1 - 2x^2)).
inline double konno_density(double x, double abs_a = std::numbers::sqrt2 / 2) {
  const double a2 = abs_a * abs_a;
  if (x * x >= a2) return 0.0;
  return std::sqrt(1 - a2) / (std::numbers::pi * (1 - x * x) * std::sqrt(a2 - x * x));
}

inline double konno_cdf(double x, double abs_a = std::numbers::sqrt2 / 2) {
  if (x <= -abs_a) return 0.0;
  if (x >= abs_a) return 1.0;
  const double b = std::sqrt(1 - abs_a * abs_a);
  return 0.5 + std::atan(x * b / std::sqrt(abs_a * abs_a - x * x)) / std::numbers::pi;
}

// sigma^2 = |a|^2 / (1 - |a|^2)
inline double oqrw_limit(const Coin& coin) {
  const double r = std::norm(coin.a);
  if (1 - r < 1e-12) throw std::invalid_argument("oqrw_limit: |a| = 1 gives a degenerate coin");
  return r / (1 - r);
}

inline double normal_cdf(double x, double variance) {
  return 0.5 * std::erfc(-x / std::sqrt(2 * variance));
}

struct Window {
  double lo, hi;
};

inline Window mode_window(int n, double speed, double w) {
  const double c = speed * n, h = w * std::sqrt(double(n));
  return {c - h, c + h};
}

struct ModeMasses {
  double left = 0, center = 0, right = 0;
  double max_imag = 0;  // largest |Im| of the three window sums
  Window w_left{}, w_center{}, w_right{};
};

inline cplx window_sum(const ComplexMeasure& m, Window win) {
  cplx acc = 0.0;
  for (int x = int(std::ceil(win.lo)); x <= int(std::floor(win.hi)); ++x) acc += m.at(x);
  return acc;
}

inline ModeMasses mode_masses(const ComplexMeasure& m, double w = 4.0) {
  ModeMasses out;
  const double v = 1 / std::sqrt(3.0);
  if (m.n == 0) {
    out.center = m.sum().real();
    out.max_imag = std::abs(m.sum().imag());
    return out;
  }
  out.w_left = mode_window(m.n, -v, w);
  out.w_center = mode_window(m.n, 0.0, w);
  out.w_right = mode_window(m.n, v, w);
  if (!(out.w_center.hi < out.w_right.lo))
    throw std::invalid_argument("mode windows overlap at n = " + std::to_string(m.n) + ", w = " + fmt_num(w));
  const cplx l = window_sum(m, out.w_left), c = window_sum(m, out.w_center), r = window_sum(m, out.w_right);
  out.left = l.real();
  out.center = c.real();
  out.right = r.real();
  out.max_imag = std::max({std::abs(l.imag()), std::abs(c.imag()), std::abs(r.imag())});
  return out;
}

// Kolmogorov distance between a lattice distribution (points y_j, weights p_j, sorted) and a CDF,
// evaluated on both sides of every jump.
inline double kolmogorov(const std::vector<double>& y, const std::vector<double>& p,
                         const std::function<double(double)>& cdf) {
  double total = 0;
  for (double v : p) total += v;
  if (y.empty() || total == 0) throw std::invalid_argument("kolmogorov: empty distribution");
  double acc = 0, dist = 0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double g = cdf(y[j]);
    dist = std::max(dist, std::abs(acc / total - g));
    acc += p[j];
    dist = std::max(dist, std::abs(acc / total - g));
  }
  return dist;
}

// Re mu restricted to [lo, hi] in scaled coordinate y = (x - shift) / scale.
inline double scaled_distance(const ComplexMeasure& m, double shift, double scale, Window win,
                              const std::function<double(double)>& cdf) {
  std::vector<double> y, p;
  for (int x = std::max(m.x_min, int(std::ceil(win.lo))); x <= std::min(m.x_max(), int(std::floor(win.hi))); ++x) {
    y.push_back((x - shift) / scale);
    p.push_back(m.at(x).real());
  }
  if (y.empty()) throw std::invalid_argument("scaled distance: empty window");
  return kolmogorov(y, p, cdf);
}

inline double scaled_cdf_distance(const ComplexMeasure& m, const LimitProfile& mode, double w = 4.0) {
  if (m.n <= 0) throw std::invalid_argument("scaled_cdf_distance: n must be positive");
  const double sn = std::sqrt(double(m.n));
  const double var = mode.variance;
  return scaled_distance(m, mode.speed * m.n, sn, mode_window(m.n, mode.speed, w),
                         [var](double y) { return normal_cdf(y, var); });
}

// x / sqrt(n) over the whole support vs N(0, variance).
inline double diffusive_distance(const ComplexMeasure& m, double variance) {
  if (m.n <= 0) throw std::invalid_argument("diffusive_distance: n must be positive");
  return scaled_distance(m, 0.0, std::sqrt(double(m.n)), {double(m.x_min), double(m.x_max())},
                         [variance](double y) { return normal_cdf(y, variance); });
}

// x / n over the whole support vs the Konno CDF.
inline double ballistic_konno_distance(const ComplexMeasure& m, double abs_a = std::numbers::sqrt2 / 2) {
  if (m.n <= 0) throw std::invalid_argument("ballistic_konno_distance: n must be positive");
  return scaled_distance(m, 0.0, double(m.n), {double(m.x_min), double(m.x_max())},
                         [abs_a](double y) { return konno_cdf(y, abs_a); });
}

// max_k |int N(0, var)(y) e^{iky} dy - e^{-var k^2 / 2}| by trapezoid quadrature.
inline double gaussian_fourier_pair_error(double variance, const std::vector<double>& ks, int points = 4001) {
  const double L = 14 * std::sqrt(variance), h = 2 * L / (points - 1);
  double worst = 0;
  for (double k : ks) {
    cplx acc = 0.0;
    for (int j = 0; j < points; ++j) {
      const double y = -L + j * h;
      const double wgt = (j == 0 || j == points - 1) ? 0.5 : 1.0;
      acc += wgt * std::exp(-y * y / (2 * variance)) / std::sqrt(2 * std::numbers::pi * variance) *
             std::polar(1.0, k * y);
    }
    worst = std::max(worst, std::abs(acc * h - std::exp(-variance * k * k / 2)));
  }
  return worst;
}

}  // namespace dcqw
