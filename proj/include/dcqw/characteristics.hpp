#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "coin.hpp"
#include "walker.hpp"

namespace dcqw {

struct SeriesOptions {
  double delta = 0.3;                                  // peak window x/n in [delta, 1]
  std::vector<double> thresholds{1e-12, 1e-10, 1e-14};  // relative support thresholds
};

struct RunRecord {
  int n = 0;
  cplx mu0 = 0.0;
  bool has_peak = false;
  int peak_x = 0;
  double peak_value = 0;
  std::vector<int> edge;  // a_n per threshold
  double min_re = 0;
  double max_abs_im = 0;
};

struct RunSeries {
  int M = 0;  // 0: untruncated walk
  std::string coin, init;
  SeriesOptions opt;
  std::vector<RunRecord> records;

  const RunRecord& at(int n) const {
    if (records.empty() || n < records.front().n || n > records.back().n)
      throw std::out_of_range("run series has no record for n = " + std::to_string(n));
    return records[std::size_t(n - records.front().n)];
  }

  void record(const ComplexMeasure& m) {
    if (!records.empty() && m.n != records.back().n + 1)
      throw std::invalid_argument("run series records must be consecutive in n");
    RunRecord r;
    r.n = m.n;
    r.mu0 = m.at(0);
    r.min_re = m.min_real();
    r.max_abs_im = m.max_imag();
    double mx = 0;
    for (const auto& z : m.values) mx = std::max(mx, std::abs(z.real()));
    if (m.n > 0) {
      const int lo = int(std::ceil(opt.delta * m.n));
      for (int x = lo; x <= m.n; ++x) {
        const double v = m.at(x).real();
        if (!r.has_peak || v >= r.peak_value) r.has_peak = true, r.peak_x = x, r.peak_value = v;
      }
      // a window maximum below the first support threshold is not a peak
      if (r.has_peak && !(r.peak_value > opt.thresholds.at(0) * mx)) r.has_peak = false;
    }
    for (double thr : opt.thresholds) {
      int a = 0;
      for (int x = m.x_min; x <= m.x_max(); ++x)
        if (std::abs(m.at(x).real()) > thr * mx) a = std::max(a, std::abs(x));
      r.edge.push_back(a);
    }
    records.push_back(std::move(r));
  }
};

// Records n = 0..steps from any walk exposing step() through the given callables.
template <class StepFn, class MeasureFn>
RunSeries run_series(int steps, StepFn&& step_fn, MeasureFn&& measure_fn, SeriesOptions opt = {}) {
  RunSeries s;
  s.opt = std::move(opt);
  s.record(measure_fn());
  for (int i = 0; i < steps; ++i) {
    step_fn();
    s.record(measure_fn());
  }
  return s;
}

inline RunSeries band_series(const Coin& coin, int M, const Vec2& g, int steps, SeriesOptions opt = {},
                             int workers = 1) {
  BandState st = init_product(coin, g, stripe_for_width(M), steps);
  auto s = run_series(
      steps, [&] { st.step(Kernel::rank1, workers); }, [&] { return measure(st); }, std::move(opt));
  s.M = M;
  return s;
}

inline RunSeries oracle_series(const Coin& coin, const Vec2& g, int steps, SeriesOptions opt = {}) {
  UnitaryWalk1D w(coin, g);
  auto s = run_series(
      steps, [&] { w.step(); }, [&] { return w.measure(); }, std::move(opt));
  s.M = 0;
  return s;
}

// Largest n <= n_max with min_x Re mu_m(x) >= -tol for every m <= n.
inline int n_crit(const Coin& coin, int M, int n_max, double tol = 1e-13, const Vec2& g = Vec2(1, 0)) {
  if (n_max < 4 * M) throw std::invalid_argument("n_crit: n_max must be at least 4M");
  BandState st = init_product(coin, g, stripe_for_width(M), n_max);
  while (st.n() < n_max) {
    st.step();
    if (measure(st).min_real() < -tol) return st.n() - 1;
  }
  return n_max;
}

// argmax of Re mu over x / n in [delta, 1] (ties to larger x), as x / n.
inline double peak_position(const ComplexMeasure& m, double delta = 0.3) {
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("peak_position: delta must lie in (0, 1)");
  const int lo = int(std::ceil(delta * m.n));
  if (m.n <= 0 || lo > m.n) throw std::invalid_argument("peak_position: empty window");
  int best = lo;
  double bv = -std::numeric_limits<double>::infinity();
  for (int x = lo; x <= m.n; ++x)
    if (m.at(x).real() >= bv) bv = m.at(x).real(), best = x;
  return double(best) / m.n;
}

// Mean of Re mu_n(0) / Re mu_n(peak) over [n_lo, n_hi]; odd n contribute 0 unless even_only.
inline double height_ratio(const RunSeries& s, int n_lo, int n_hi, bool even_only = false) {
  if (!(n_lo < n_hi)) throw std::invalid_argument("height_ratio: need n_lo < n_hi");
  double acc = 0;
  int count = 0;
  for (int n = n_lo; n <= n_hi; ++n) {
    if (even_only && n % 2) continue;
    const auto& r = s.at(n);
    if (!r.has_peak || r.peak_value == 0)
      throw std::runtime_error("height_ratio: vanishing peak value at n = " + std::to_string(n));
    acc += r.mu0.real() / r.peak_value;
    ++count;
  }
  return acc / count;
}

struct FitResult {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double rms = 0;            // residual of the log-log fit
  int points = 0;
  int n_lo = 0, n_hi = 0;    // window actually used
  bool auto_selected = false;
  double slope_spread = 0;   // range of segment slopes over the requested window
};

struct FitOptions {
  bool auto_window = true;
  int segments = 4;
  double spread_tol = 0.05;
  int min_points = 10;
};

inline FitResult least_squares(const std::vector<double>& lx, const std::vector<double>& ly) {
  FitResult f;
  const double N = double(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) sx += lx[i], sy += ly[i], sxx += lx[i] * lx[i], sxy += lx[i] * ly[i];
  f.slope = (N * sxy - sx * sy) / (N * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / N;
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - f.intercept - f.slope * lx[i];
    ss += e * e;
  }
  f.rms = std::sqrt(ss / N);
  f.points = int(lx.size());
  return f;
}

// Slope of log y vs log n over points with n in [n_lo, n_hi]; y must be positive.
inline FitResult fit_loglog(const std::vector<int>& ns, const std::vector<double>& ys, int n_lo, int n_hi,
                            const FitOptions& fo = {}) {
  std::vector<int> n_in;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (ns[i] >= n_lo && ns[i] <= n_hi && ys[i] > 0) {
      n_in.push_back(ns[i]);
      lx.push_back(std::log(double(ns[i])));
      ly.push_back(std::log(ys[i]));
    }
  if (int(lx.size()) < fo.min_points)
    throw std::runtime_error("fit: only " + std::to_string(lx.size()) + " usable points in [" +
                             std::to_string(n_lo) + ", " + std::to_string(n_hi) + "]");
  FitResult full = least_squares(lx, ly);
  full.n_lo = n_in.front();
  full.n_hi = n_in.back();
  if (!fo.auto_window || fo.segments < 2) return full;

  const std::size_t S = std::size_t(fo.segments), len = lx.size() / S;
  if (len < 3) return full;
  std::vector<double> seg(S);
  for (std::size_t j = 0; j < S; ++j) {
    const std::size_t a = j * len, b = (j + 1 == S) ? lx.size() : a + len;
    seg[j] = least_squares({lx.begin() + std::ptrdiff_t(a), lx.begin() + std::ptrdiff_t(b)},
                           {ly.begin() + std::ptrdiff_t(a), ly.begin() + std::ptrdiff_t(b)})
                 .slope;
  }
  full.slope_spread = *std::max_element(seg.begin(), seg.end()) - *std::min_element(seg.begin(), seg.end());
  if (full.slope_spread < fo.spread_tol) return full;

  // longest run of consecutive segments whose slopes stay within spread_tol; later runs win ties
  std::size_t best_a = S - 1, best_len = 1;
  for (std::size_t a = 0; a < S; ++a) {
    double lo = seg[a], hi = seg[a];
    for (std::size_t b = a; b < S; ++b) {
      lo = std::min(lo, seg[b]);
      hi = std::max(hi, seg[b]);
      if (hi - lo >= fo.spread_tol) break;
      if (b - a + 1 >= best_len) best_len = b - a + 1, best_a = a;
    }
  }
  const std::size_t a = best_a * len, b = (best_a + best_len == S) ? lx.size() : (best_a + best_len) * len;
  if (int(b - a) < fo.min_points) return full;
  FitResult sub = least_squares({lx.begin() + std::ptrdiff_t(a), lx.begin() + std::ptrdiff_t(b)},
                                {ly.begin() + std::ptrdiff_t(a), ly.begin() + std::ptrdiff_t(b)});
  sub.n_lo = n_in[a];
  sub.n_hi = n_in[b - 1];
  sub.auto_selected = true;
  sub.slope_spread = full.slope_spread;
  return sub;
}

// d_n = a_n - peak_x in lattice units; d_n ~ n^gamma.
inline FitResult tail_exponent(const RunSeries& s, int n_lo, int n_hi, std::size_t threshold_index = 0,
                               const FitOptions& fo = {}) {
  std::vector<int> ns;
  std::vector<double> d;
  for (int n = n_lo; n <= n_hi; ++n) {
    const auto& r = s.at(n);
    if (!r.has_peak) continue;
    ns.push_back(n);
    d.push_back(double(r.edge.at(threshold_index) - r.peak_x));
  }
  return fit_loglog(ns, d, n_lo, n_hi, fo);
}

enum class Location { center, side };

// Re mu_n(0) over even n, or Re mu_n at the running peak.
inline FitResult decay_exponent(const RunSeries& s, Location loc, int n_lo, int n_hi, const FitOptions& fo = {}) {
  std::vector<int> ns;
  std::vector<double> vals;
  for (int n = n_lo; n <= n_hi; ++n) {
    const auto& r = s.at(n);
    if (loc == Location::center) {
      if (n % 2) continue;
      ns.push_back(n);
      vals.push_back(r.mu0.real());
    } else {
      if (!r.has_peak) continue;
      ns.push_back(n);
      vals.push_back(r.peak_value);
    }
  }
  if (vals.empty()) throw std::runtime_error("decay fit: no samples");
  const bool pos = vals.front() > 0;
  for (std::size_t i = 0; i < vals.size(); ++i)
    if ((vals[i] > 0) != pos)
      throw std::runtime_error("decay fit rejected: tracked value changes sign at n = " + std::to_string(ns[i]));
  if (!pos)
    for (double& v : vals) v = -v;
  return fit_loglog(ns, vals, n_lo, n_hi, fo);
}

}  // namespace dcqw
