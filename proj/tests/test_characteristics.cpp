#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dcqw/characteristics.hpp"

using namespace dcqw;

namespace {

const Vec2 g_diag(std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2);

ComplexMeasure synthetic(int n, std::vector<double> re) {
  ComplexMeasure m;
  m.n = n;
  m.x_min = -n;
  for (double v : re) m.values.emplace_back(v, 0.0);
  return m;
}

const RunSeries& m2_series() {
  static const RunSeries s = band_series(make_hadamard(), 2, g_diag, 2000);
  return s;
}

}  // namespace

TEST(Characteristics, CriticalTimeWidthOne) {
  for (int nm : {4, 50, 300}) EXPECT_EQ(n_crit(make_hadamard(), 1, nm), nm);
  EXPECT_THROW(n_crit(make_hadamard(), 5, 19), std::invalid_argument);
}

TEST(Characteristics, CriticalTimeWidthTwoIsFinite) {
  const int nc = n_crit(make_hadamard(), 2, 200);
  EXPECT_LT(nc, 200);
  auto st = init_product(make_hadamard(), Vec2(1, 0), stripe_for_width(2), nc + 1);
  for (int n = 0; n < nc; ++n) {
    st.step();
    EXPECT_GE(measure(st).min_real(), -1e-13);
  }
  st.step();
  EXPECT_LT(measure(st).min_real(), -1e-13);
}

TEST(Characteristics, PeakPositionAndTies) {
  // n = 4, x = -4..4
  const auto m = synthetic(4, {0, 0, 0, 0, 9, 1, 3, 3, 0});
  EXPECT_EQ(peak_position(m, 0.3), 0.75);
  auto scaled = m;
  for (auto& z : scaled.values) z *= 7.5;
  EXPECT_EQ(peak_position(scaled, 0.3), 0.75);
  EXPECT_THROW(peak_position(m, 0.0), std::invalid_argument);
  EXPECT_THROW(peak_position(synthetic(0, {1}), 0.5), std::invalid_argument);
}

TEST(Characteristics, PeakPositionWidthTwo) {
  EXPECT_NEAR(double(m2_series().at(2000).peak_x) / 2000, 1 / std::sqrt(3.0), 0.01);
}

TEST(Characteristics, PeakPositionUnboundedWalk) {
  const Coin h = make_hadamard();
  const int n = 500;
  auto st = init_product(h, Vec2(1, 0), stripe_for_width(2 * n + 1), n);
  const double band = peak_position(measure(evolve(std::move(st), n)));
  UnitaryWalk1D w(h, Vec2(1, 0));
  for (int i = 0; i < n; ++i) w.step();
  EXPECT_EQ(band, peak_position(w.measure()));
  EXPECT_NEAR(band, 0.70, 0.02);
}

TEST(Characteristics, HeightRatioParity) {
  const auto& s = m2_series();
  const double all = height_ratio(s, 1001, 2000), even = height_ratio(s, 1001, 2000, true);
  EXPECT_NEAR(even / all, 2.0, 0.01);
  EXPECT_THROW(height_ratio(s, 10, 10), std::invalid_argument);
}

TEST(Characteristics, SyntheticPowerLaw) {
  std::vector<int> ns;
  std::vector<double> ys;
  for (int n = 100; n <= 400; ++n) ns.push_back(n), ys.push_back(3.0 * std::pow(n, -0.42));
  const auto f = fit_loglog(ns, ys, 100, 400);
  EXPECT_NEAR(f.slope, -0.42, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-10);
  EXPECT_FALSE(f.auto_selected);
  for (auto& y : ys) y *= 1e-6;
  EXPECT_NEAR(fit_loglog(ns, ys, 100, 400).slope, -0.42, 1e-12);
  EXPECT_THROW(fit_loglog(ns, ys, 100, 105), std::runtime_error);
}

TEST(Characteristics, FitDropsNonPositivePoints) {
  std::vector<int> ns;
  std::vector<double> ys;
  for (int n = 10; n <= 60; ++n) ns.push_back(n), ys.push_back(n % 7 ? std::sqrt(double(n)) : 0.0);
  const auto f = fit_loglog(ns, ys, 10, 60);
  EXPECT_NEAR(f.slope, 0.5, 1e-12);
  EXPECT_EQ(f.points, 51 - 7);
}

TEST(Characteristics, AutoWindowOnBrokenPowerLaw) {
  std::vector<int> ns;
  std::vector<double> ys;
  for (int n = 100; n <= 900; ++n) ns.push_back(n), ys.push_back(n < 300 ? std::pow(n, 1.0) : std::pow(300.0, 0.7) * std::pow(n, 0.3));
  const auto f = fit_loglog(ns, ys, 100, 900);
  EXPECT_TRUE(f.auto_selected);
  EXPECT_GT(f.slope_spread, 0.05);
  EXPECT_NEAR(f.slope, 0.3, 1e-10);
  EXPECT_GE(f.n_lo, 300);
  FitOptions fixed;
  fixed.auto_window = false;
  EXPECT_GT(fit_loglog(ns, ys, 100, 900, fixed).slope, 0.35);
}

TEST(Characteristics, DecayRejectsSignChange) {
  RunSeries s;
  for (int n = 0; n <= 40; ++n) {
    auto m = synthetic(n, std::vector<double>(std::size_t(2 * n + 1), 0.0));
    m.values[std::size_t(n)] = (n < 30 ? 1.0 : -1.0) / (n + 1);
    s.record(m);
  }
  EXPECT_THROW(decay_exponent(s, Location::center, 2, 40), std::runtime_error);
}

TEST(Characteristics, SeriesRecordsMustBeConsecutive) {
  RunSeries s;
  s.record(synthetic(0, {1}));
  EXPECT_THROW(s.record(synthetic(2, {0, 0, 1, 0, 0})), std::invalid_argument);
  EXPECT_THROW(s.at(1), std::out_of_range);
}

TEST(Characteristics, SeriesIsDeterministic) {
  const auto a = band_series(make_hadamard(), 3, g_diag, 150);
  const auto b = band_series(make_hadamard(), 3, g_diag, 150, {}, 3);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].mu0, b.records[i].mu0);
    EXPECT_EQ(a.records[i].peak_x, b.records[i].peak_x);
    EXPECT_EQ(a.records[i].peak_value, b.records[i].peak_value);
    EXPECT_EQ(a.records[i].edge, b.records[i].edge);
  }
}

TEST(Characteristics, SupportEdgeWithinLightCone) {
  for (const auto& r : m2_series().records)
    for (int a : r.edge) EXPECT_LE(a, r.n);
}

TEST(Characteristics, WidthTwoExponents) {
  const auto& s = m2_series();
  EXPECT_NEAR(tail_exponent(s, 1000, 2000).slope, 0.5, 0.07);
  EXPECT_NEAR(decay_exponent(s, Location::center, 1000, 2000).slope, -0.5, 0.03);
  EXPECT_NEAR(decay_exponent(s, Location::side, 1000, 2000).slope, -0.5, 0.03);
}

TEST(Characteristics, UnboundedWalkExponents) {
  const auto s = oracle_series(make_hadamard(), Vec2(1, 0), 2000);
  EXPECT_NEAR(tail_exponent(s, 1000, 2000).slope, 1.0 / 3, 0.07);
  EXPECT_NEAR(decay_exponent(s, Location::side, 1000, 2000).slope, -2.0 / 3, 0.05);
  EXPECT_NEAR(double(s.at(2000).peak_x) / 2000, 0.70, 0.02);
}

TEST(Characteristics, WidthOneHasNoSidePeak) {
  // Gaussian tail at x = 0.3 n is ~exp(-0.045 n) of the maximum
  const auto s = band_series(make_hadamard(), 1, Vec2(1, 0), 2000);
  EXPECT_FALSE(s.at(2000).has_peak);
  EXPECT_TRUE(s.at(100).has_peak);
  EXPECT_THROW(height_ratio(s, 1001, 2000), std::runtime_error);
}
