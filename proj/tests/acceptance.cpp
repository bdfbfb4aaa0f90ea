// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dcqw/dcqw.hpp"
#include "reference_matrices.hpp"

using namespace dcqw;

namespace {

const double s3 = std::sqrt(3.0);
const Vec2 g_up(1, 0);
const Vec2 g_diag(std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2);

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
  void note(const std::string& what) { detail << (detail.tellp() > 0 ? "; " : "") << what; }
};

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(dt < budget_s, "time " + num(dt) + " s < " + num(budget_s) + " s");
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.str().c_str());
  std::fflush(stdout);
}

ComplexMeasure run(int M, const Vec2& g, int n) {
  return measure(evolve(init_product(make_hadamard(), g, stripe_for_width(M), n), n));
}

}  // namespace

int main() {
  const Coin h = make_hadamard();

  criterion(1, "band walk equals 1D walk when the boundary is out of reach", 1.0, [&](Outcome& o) {
    double err = 0;
    for (const Vec2& g : {g_up, g_diag}) {
      auto st = init_product(h, g, stripe_for_width(101), 50);
      UnitaryWalk1D w(h, g);
      for (int n = 1; n <= 50; ++n) {
        st.step();
        w.step();
        const auto m = measure(st);
        const auto p = w.distribution();
        for (int x = -n; x <= n; ++x) err = std::max(err, std::abs(m.at(x) - p.at(x)));
      }
    }
    o.check(err <= 1e-12, "max |mu - p| = " + num(err));
  });

  criterion(2, "width-one band equals the correlated random walk", 1.0, [&](Outcome& o) {
    double err = 0, im = 0, neg = 0, drift = 0;
    for (const Vec2& g : {g_up, g_diag}) {
      auto st = init_product(h, g, {0, 0}, 500);
      CorrelatedWalk c(h, g);
      for (int n = 1; n <= 500; ++n) {
        st.step();
        c.step();
        const auto m = measure(st);
        const auto p = c.distribution();
        for (int x = -n; x <= n; ++x) err = std::max(err, std::abs(m.at(x) - p.at(x)));
        im = std::max(im, m.max_imag());
        neg = std::min(neg, m.min_real());
        drift = std::max(drift, std::abs(m.sum() - 1.0));
      }
    }
    o.check(err <= 1e-12, "max |mu - p| = " + num(err));
    o.check(im == 0 && neg >= 0, "max |Im| = " + num(im) + ", min Re = " + num(neg));
    o.check(drift <= 1e-12, "|sum - 1| = " + num(drift));
  });

  criterion(3, "measure sum is conserved", 60.0, [&](Outcome& o) {
    double drift = 0;
    for (int M : {1, 2, 3, 5, 10})
      for (const Vec2& g : {g_up, g_diag}) {
        auto st = init_product(h, g, stripe_for_width(M), 2000);
        for (int n = 1; n <= 2000; ++n) {
          st.step();
          drift = std::max(drift, std::abs(measure(st).sum() - 1.0));
        }
      }
    o.check(drift <= 1e-10, "max |sum - 1| = " + num(drift));
  });

  criterion(4, "zero-momentum algebra for width two", 1.0, [&](Outcome& o) {
    const auto W = build_w(h, -1, 0, 0.0);
    const double dw = (W.matrix - ref::w0()).cwiseAbs().maxCoeff();
    o.check(dw <= 1e-15, "W(0) entry error " + num(dw));
    const auto es = eig(W);
    const std::vector<cplx> values(es.values.begin(), es.values.end());
    const double lit = multiset_distance(values, {0.0, 0.0, 1.0, 1.0, 1.0, -0.5, cplx(-1, 1) / 4.0, cplx(-1, -1) / 4.0});
    o.check(lit <= 1e-10, "distance to {0,0,1,1,1,-1/2,(-1+-i)/4} = " + num(lit));
    const double r7 = std::sqrt(7.0);
    const double fixed =
        multiset_distance(values, {0.0, 0.0, 1.0, 1.0, 1.0, -0.5, cplx(-1, r7) / 4.0, cplx(-1, -r7) / 4.0});
    o.note("distance to {0,0,1,1,1,-1/2,(-1+-i sqrt7)/4} = " + num(fixed));
    const double mp = minimal_poly_residual(h, -1, 0), wit = minimality_witness(h, -1, 0);
    o.check(mp < 1e-12, "minimal polynomial residual " + num(mp));
    o.check(wit >= 0.1, "minimality witness " + num(wit));
    const auto kr = kato_reduction();
    const double dp = (kr.Pi - ref::projection()).cwiseAbs().maxCoeff();
    o.check(dp <= 1e-14, "Pi entry error " + num(dp));
    o.check(kr.skew_residual <= 1e-12, "||R + R*|| = " + num(kr.skew_residual));
    const double de = std::max({std::abs(kr.values[0]), std::abs(kr.values[1] - cplx(0, 1 / s3)),
                                std::abs(kr.values[2] - cplx(0, -1 / s3))});
    o.check(de <= 1e-12, "reduced eigenvalue error " + num(de));
    double gap = 1e300;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) gap = std::min(gap, std::abs(kr.values[std::size_t(i)] - kr.values[std::size_t(j)]));
    o.check(gap > 1e-6, "reduced eigenvalues simple, min gap " + num(gap));
  });

  criterion(5, "small-momentum expansions and projections", 5.0, [&](Outcome& o) {
    double worst_ratio = 1e300;
    for (long double d : {1e-1L, 1e-2L, 1e-3L}) {
      const auto a = expansion_errors<long double>(h, d), b = expansion_errors<long double>(h, d / 2);
      for (int j = 0; j < 3; ++j)
        worst_ratio = std::min(worst_ratio, double(a.error[std::size_t(j)] / b.error[std::size_t(j)]));
    }
    o.check(worst_ratio >= 6, "min error ratio per halving " + num(worst_ratio));
    const auto kr = kato_reduction();
    std::vector<ProjectionCheck> pc;
    for (double d : {1e-1, 1e-2, 1e-3}) pc.push_back(perturbed_projection_check(d, kr));
    double at2 = 0;
    bool decreasing = true;
    for (int j = 0; j < 3; ++j) {
      at2 = std::max(at2, pc[1].residual[std::size_t(j)]);
      decreasing = decreasing && pc[1].residual[std::size_t(j)] < pc[0].residual[std::size_t(j)] &&
                   pc[2].residual[std::size_t(j)] < pc[1].residual[std::size_t(j)];
    }
    o.check(at2 < 5e-2, "projection residual at 1e-2: " + num(at2));
    o.check(decreasing, "residuals decrease with delta");
  });

  criterion(6, "three-mode limit at n = 2000", 120.0, [&](Outcome& o) {
    const auto m = run(2, g_diag, 2000);
    const auto mm = mode_masses(m);
    const double em = std::max({std::abs(mm.left - (3 + s3) / 12), std::abs(mm.center - 0.5),
                                std::abs(mm.right - (3 - s3) / 12)});
    o.check(em <= 0.02, "masses " + num(mm.left) + "/" + num(mm.center) + "/" + num(mm.right) + ", error " + num(em));
    const auto prof = three_mode_profiles(g_diag, 4.0 / 9);
    const double dc = scaled_cdf_distance(m, prof[0]);
    o.check(dc < 0.05, "center vs N(0,1/2) " + num(dc));
    const double dr = scaled_cdf_distance(m, prof[1]), dl = scaled_cdf_distance(m, prof[2]);
    o.check(dr < 0.07 && dl < 0.07, "sides vs N(0,4/9) " + num(dr) + "/" + num(dl));
    const auto alt = three_mode_profiles(g_diag, 1.0 / 9);
    o.note("sides vs N(0,1/9) " + num(scaled_cdf_distance(m, alt[1])) + "/" + num(scaled_cdf_distance(m, alt[2])));
  });

  criterion(7, "open walk central limit at n = 2000", 5.0, [&](Outcome& o) {
    const double d = diffusive_distance(run(1, g_up, 2000), oqrw_limit(h));
    o.check(d < 0.05, "Kolmogorov distance to N(0,1) " + num(d));
  });

  criterion(8, "critical time rule", 60.0, [&](Outcome& o) {
    const int n_max = 200;
    o.check(n_crit(h, 1, n_max) == n_max, "n_crit(1) = " + std::to_string(n_crit(h, 1, n_max)));
    std::string table;
    int bad = 0;
    for (int M = 2; M <= 20; ++M) {
      const int nc = n_crit(h, M, n_max), want = M % 2 ? 2 * M : 3 * M;
      if (std::abs(nc - want) > 2) ++bad;
      table += (M > 2 ? " " : "") + std::to_string(M) + ":" + std::to_string(nc) + "/" + std::to_string(want);
    }
    o.check(bad == 0, std::to_string(bad) + " of 19 widths off the rule (M:n_crit/rule " + table + ")");
  });

  criterion(9, "peak position", 120.0, [&](Outcome& o) {
    const double p2 = peak_position(run(2, g_diag, 2000));
    o.check(std::abs(p2 - 1 / s3) < 0.01, "M=2: " + num(p2));
    UnitaryWalk1D w(h, g_up);
    for (int i = 0; i < 2000; ++i) w.step();
    const double p = peak_position(w.measure());
    o.check(p >= 0.68 && p <= 0.72, "untruncated: " + num(p));
  });

  criterion(10, "growth and decay exponents", 600.0, [&](Outcome& o) {
    const auto s = band_series(h, 2, g_diag, 2000);
    const auto gm = tail_exponent(s, 1000, 2000);
    const auto rc = decay_exponent(s, Location::center, 1000, 2000);
    const auto rs = decay_exponent(s, Location::side, 1000, 2000);
    o.check(std::abs(gm.slope - 0.5) <= 0.07, "M=2 gamma " + num(gm.slope));
    o.check(std::abs(rc.slope + 0.5) <= 0.03, "r_center " + num(rc.slope));
    o.check(std::abs(rs.slope + 0.5) <= 0.03, "r_side " + num(rs.slope));
    const auto u = oracle_series(h, g_up, 2000);
    const auto gu = tail_exponent(u, 1000, 2000);
    const auto ru = decay_exponent(u, Location::side, 1000, 2000);
    o.check(std::abs(gu.slope - 1.0 / 3) <= 0.07, "untruncated gamma " + num(gu.slope));
    o.check(std::abs(ru.slope + 2.0 / 3) <= 0.05, "untruncated r_side " + num(ru.slope));
  });

  criterion(11, "characteristic function matches the simulated measure", 10.0, [&](Outcome& o) {
    double err = 0;
    for (int M = 1; M <= 4; ++M)
      for (const Vec2& g : {g_up, g_diag}) {
        const Stripe sp = stripe_for_width(M);
        auto st = init_product(h, g, sp, 60);
        for (int n = 0; n <= 60; ++n) {
          if (n > 0) st.step();
          const auto m = measure(st);
          for (int j = 0; j < 64; ++j) {
            const double k = 2 * std::numbers::pi * j / 64;
            err = std::max(err, std::abs(characteristic_function(h, sp, g, n, k) - fourier_sum(m, k)));
          }
        }
      }
    o.check(err <= 1e-9, "max difference " + num(err));
  });

  criterion(12, "eigenvector runs move ballistically", 5.0, [&](Outcome& o) {
    const auto kr = kato_reduction();
    const int n = 200;
    for (int j : {1, 2}) {
      auto st = evolve(init_band_vector(h, split_blocks(kr.v[std::size_t(j)]), {-1, 0}, n), n);
      const auto m = measure(st);
      cplx left = 0.0, centre = 0.0, right = 0.0;
      double xl = 0, xr = 0;
      for (int x = -n; x <= n; ++x) {
        const cplx v = m.at(x);
        if (std::abs(x) <= n / 4) centre += v;
        else if (x < 0) left += v, xl += x * v.real();
        else right += v, xr += x * v.real();
      }
      const bool to_right = j == 1;
      const cplx main = to_right ? right : left;
      const double speed = (to_right ? xr / right.real() : -xl / left.real()) / n;
      const double other = std::max(std::abs(centre), std::abs(to_right ? left : right));
      const std::string tag = to_right ? "v2 right" : "v3 left";
      o.check(main.real() > 0, tag + " mass " + num(main.real()));
      o.check(std::abs(speed * s3 - 1) <= 0.02, tag + " speed " + num(speed));
      o.check(other < 1e-2, tag + " other regions " + num(other));
    }
  });

  std::printf("%d criteria failed\n", failures);
  return failures ? 1 : 0;
}
