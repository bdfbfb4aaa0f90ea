// dcqw command-line front end.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dcqw/dcqw.hpp"
#include "dcqw/io.hpp"

using namespace dcqw;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config_path;
  std::string out;
  int workers = 1;
  bool seedless = false;
};

// Collects named pass/fail checks for the exit status and the JSON report.
struct Checks {
  json list = json::array();
  bool ok = true;

  void add(const std::string& name, bool pass, double value, double limit) {
    list.push_back({{"check", name}, {"pass", pass}, {"value", value}, {"limit", limit}});
    ok = ok && pass;
    std::printf("%s %s: %s (limit %s)\n", pass ? "ok  " : "FAIL", name.c_str(), fmt17(value).c_str(),
                fmt17(limit).c_str());
  }
};

struct Run {
  RunConfig cfg;
  std::string hash;
  fs::path out;
  int workers = 1;
  bool seedless = false;
};

Run setup(const Common& c) {
  Run r;
  if (!c.config_path.empty()) r.cfg = load_config(c.config_path);
  if (!c.out.empty()) r.cfg.out = c.out;
  if (c.workers < 1) throw std::invalid_argument("--workers must be at least 1");
  r.workers = c.workers;
  r.seedless = c.seedless;
  r.hash = config_hash(r.cfg);
  r.out = r.cfg.out;
  fs::create_directories(r.out);
  return r;
}

json provenance(const Run& r, const std::string& command) {
  return {{"command", command},
          {"config_hash", r.hash},
          {"config", to_text(r.cfg)},
          {"rng", "none"},
          {"seedless", r.seedless},
          {"workers", r.workers}};
}

BandState initial_state(const RunConfig& cfg, int n_max) {
  const Coin coin = coin_of(cfg);
  const Stripe sp = stripe_of(cfg);
  if (cfg.band.empty()) return init_product(coin, g_of(cfg), sp, n_max);
  if (cfg.band.size() % 4) throw std::invalid_argument("band vector length must be a multiple of 4");
  VecX flat(Eigen::Index(cfg.band.size()));
  for (std::size_t i = 0; i < cfg.band.size(); ++i) flat(Eigen::Index(i)) = cfg.band[i];
  return init_band_vector(coin, split_blocks(flat), sp, n_max);
}

int finish(const Run& r, const std::string& command, json report, const Checks& checks) {
  report["checks"] = checks.list;
  report["provenance"] = provenance(r, command);
  write_json(r.out / (command + ".json"), report);
  return checks.ok ? 0 : 1;
}

int cmd_simulate(const Run& r) {
  const auto& cfg = r.cfg;
  const Kernel kernel = cfg.kernel == "dense" ? Kernel::dense : Kernel::rank1;
  auto snaps = cfg.snapshots;
  if (snaps.empty()) snaps = {cfg.steps};
  for (int s : snaps)
    if (s < 0 || s > cfg.steps) throw std::invalid_argument("snapshot " + std::to_string(s) + " outside [0, steps]");
  std::sort(snaps.begin(), snaps.end());

  BandState st = initial_state(cfg, cfg.steps);
  const cplx sum0 = measure(st).sum();
  double max_im = 0, drift = 0;
  json norms = json::array();
  std::size_t next = 0;
  for (int n = 0;; ++n) {
    const auto m = measure(st);
    max_im = std::max(max_im, m.max_imag());
    drift = std::max(drift, std::abs(m.sum() - sum0));
    norms.push_back(st.norm());
    while (next < snaps.size() && snaps[next] == n) {
      const std::string tag = "n" + std::to_string(n);
      write_measure_csv(r.out / ("measure_" + tag + ".csv"), m, r.hash);
      write_normalized_csv(r.out / ("normalized_" + tag + ".csv"), m, r.hash);
      if (cfg.band_field) write_band_csv(r.out / ("band_" + tag + ".csv"), n, band_field(st), r.hash);
      ++next;
    }
    if (n == cfg.steps) break;
    st.step(kernel, r.workers);
  }
  std::printf("simulate: %d steps, max |Im mu| %s, sum drift %s\n", cfg.steps, fmt17(max_im).c_str(),
              fmt17(drift).c_str());
  json rep{{"steps", cfg.steps},
           {"initial_sum", to_json(sum0)},
           {"max_abs_im", max_im},
           {"sum_drift", drift},
           {"norm_trace", norms}};
  return finish(r, "simulate", rep, {});
}

int cmd_spectrum(const Run& r) {
  const auto& cfg = r.cfg;
  if (cfg.k_points < 2) throw std::invalid_argument("k_points must be at least 2");
  const Coin coin = coin_of(cfg);
  const Stripe sp = stripe_of(cfg);
  CsvWriter csv(r.out / "spectrum.csv", "M,k,re_lambda,im_lambda,abs_lambda", r.hash);
  std::vector<std::vector<cplx>> rows;
  double max_abs = 0, max_res = 0;
  for (int j = 0; j < cfg.k_points; ++j) {
    const double k = 2 * std::numbers::pi * j / cfg.k_points;
    const auto es = eig(build_w(coin, sp.s, sp.t, k));
    std::vector<cplx> v(es.values.begin(), es.values.end());
    std::sort(v.begin(), v.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
    for (const auto& z : v) {
      csv.row(sp.width(), k, z.real(), z.imag(), std::abs(z));
      max_abs = std::max(max_abs, std::abs(z));
    }
    max_res = std::max(max_res, es.max_residual());
    rows.push_back(std::move(v));
  }
  // k_j and k_{K-j} = 2 pi - k_j
  double sym = 0;
  for (int j = 1; j < cfg.k_points; ++j) {
    std::vector<cplx> c;
    for (const auto& z : rows[std::size_t(j)]) c.push_back(std::conj(z));
    sym = std::max(sym, multiset_distance(c, rows[std::size_t(cfg.k_points - j)]));
  }
  Checks ch;
  ch.add("spectral radius", max_abs <= 1 + 1e-10, max_abs, 1 + 1e-10);
  ch.add("eigen residual", max_res <= 1e-10, max_res, 1e-10);
  ch.add("conjugate symmetry k vs 2pi-k", sym <= 1e-8, sym, 1e-8);
  return finish(r, "spectrum", {{"M", sp.width()}, {"k_points", cfg.k_points}}, ch);
}

int cmd_kato(const Run& r) {
  const auto kr = kato_reduction(coin_of(r.cfg), stripe_of(r.cfg));
  json rep{{"closed_form", kr.closed_form},
           {"rank", kr.rank},
           {"Pi", to_json(kr.Pi)},
           {"T1", to_json(kr.T1)},
           {"R", to_json(kr.R)}};
  json pairs = json::array();
  for (std::size_t j = 0; j < kr.v.size(); ++j) pairs.push_back({{"value", to_json(kr.values[j])}, {"vector", to_json(kr.v[j])}});
  rep["eigenpairs"] = pairs;
  Checks ch;
  ch.add("Pi idempotent", kr.idempotence_residual < 1e-10, kr.idempotence_residual, 1e-10);
  ch.add("Pi hermitian", kr.hermitian_residual < 1e-10, kr.hermitian_residual, 1e-10);
  ch.add("Pi commutes with W(0)", kr.commutator_residual < 1e-10, kr.commutator_residual, 1e-10);
  ch.add("R skew-hermitian", kr.skew_residual < 1e-8, kr.skew_residual, 1e-8);
  ch.add("eigen residual", kr.eigen_residual < 1e-8, kr.eigen_residual, 1e-8);
  ch.add("orthonormality", kr.orthonormality_residual < 1e-8, kr.orthonormality_residual, 1e-8);
  ch.add("range", kr.range_residual < 1e-8, kr.range_residual, 1e-8);
  if (kr.closed_form) {
    std::vector<json> pc;
    for (double d : {1e-1, 1e-2, 1e-3}) {
      const auto p = perturbed_projection_check(d, kr);
      pc.push_back({{"delta", d}, {"residual", p.residual}});
    }
    rep["projection_checks"] = pc;
  }
  return finish(r, "kato", rep, ch);
}

int cmd_limits(const Run& r) {
  const auto& cfg = r.cfg;
  const Coin coin = coin_of(cfg);
  const Stripe sp = stripe_of(cfg);
  if (cfg.steps < 1) throw std::invalid_argument("limits needs steps >= 1");
  const auto m = measure(evolve(initial_state(cfg, cfg.steps), cfg.steps, Kernel::rank1, r.workers));
  const int M = sp.width();
  json rep{{"M", M}, {"n", cfg.steps}};
  Checks ch;
  if (M == 1) {
    const double var = oqrw_limit(coin);
    const double d = diffusive_distance(m, var);
    rep["variance"] = var;
    rep["distance"] = d;
    ch.add("x/sqrt(n) vs N(0, sigma^2)", d < 0.05, d, 0.05);
  } else if (M >= 2 * cfg.steps + 1) {
    const double d = ballistic_konno_distance(m, std::abs(coin.a));
    rep["distance"] = d;
    ch.add("x/n vs weak-limit CDF", d < 0.08, d, 0.08);
  } else if (M == 2 && is_hadamard(coin)) {
    const Vec2 g = g_of(cfg);
    const auto c = limit_coefficients(g);
    const auto mm = mode_masses(m, cfg.window_w);
    rep["coefficients"] = {{"minus", to_json(c.minus)}, {"zero", to_json(c.zero)}, {"plus", to_json(c.plus)},
                           {"complex_valued", c.complex_valued}};
    rep["masses"] = {{"left", mm.left}, {"center", mm.center}, {"right", mm.right}, {"max_abs_im", mm.max_imag}};
    rep["windows"] = {{"w", cfg.window_w},
                      {"left", {mm.w_left.lo, mm.w_left.hi}},
                      {"center", {mm.w_center.lo, mm.w_center.hi}},
                      {"right", {mm.w_right.lo, mm.w_right.hi}}};
    ch.add("left mass", std::abs(mm.left - c.minus.real()) <= 0.02, mm.left - c.minus.real(), 0.02);
    ch.add("center mass", std::abs(mm.center - 0.5) <= 0.02, mm.center - 0.5, 0.02);
    ch.add("right mass", std::abs(mm.right - c.plus.real()) <= 0.02, mm.right - c.plus.real(), 0.02);
    json dist;
    for (const auto& p : three_mode_profiles(g, cfg.side_variance)) {
      const double d = scaled_cdf_distance(m, p, cfg.window_w);
      dist[mode_name(p.mode)] = d;
      const double lim = p.mode == Mode::center ? 0.05 : 0.07;
      ch.add(std::string(mode_name(p.mode)) + " mode CDF (variance " + fmt_num(p.variance) + ")", d < lim, d, lim);
    }
    rep["distances"] = dist;
    rep["side_variance"] = cfg.side_variance;
  } else {
    throw std::invalid_argument("limits: no limit law for width " + std::to_string(M) + " at n = " +
                                std::to_string(cfg.steps));
  }
  return finish(r, "limits", rep, ch);
}

struct CharRow {
  int M = 0, n_crit = 0;
  double xmax = NAN, ratio = NAN;
  FitResult gamma, rc, rs;
  std::vector<double> gamma_by_threshold;
  std::vector<std::string> notes;
};

CharRow characteristics_for(const RunConfig& cfg, int M) {
  const Coin coin = coin_of(cfg);
  CharRow row;
  row.M = M;
  row.n_crit = n_crit(coin, M, std::max(cfg.ncrit_nmax, 4 * M), cfg.ncrit_tol);
  SeriesOptions so;
  so.delta = cfg.delta;
  so.thresholds = {cfg.support_threshold, 1e-10, 1e-14};
  const auto s = band_series(coin, M, g_of(cfg), cfg.steps, so);
  if (s.at(cfg.steps).has_peak) row.xmax = double(s.at(cfg.steps).peak_x) / cfg.steps;
  else row.notes.push_back("no off-diagonal peak at n = " + std::to_string(cfg.steps));
  auto attempt = [&](const char* what, auto f) {
    try {
      f();
    } catch (const std::exception& e) {
      row.notes.push_back(std::string(what) + ": " + e.what());
    }
  };
  attempt("ratio", [&] { row.ratio = height_ratio(s, cfg.ratio_lo, cfg.ratio_hi); });
  attempt("gamma", [&] { row.gamma = tail_exponent(s, cfg.fit_lo, cfg.fit_hi, 0); });
  for (std::size_t t = 1; t < so.thresholds.size(); ++t)
    attempt("gamma", [&] { row.gamma_by_threshold.push_back(tail_exponent(s, cfg.fit_lo, cfg.fit_hi, t).slope); });
  attempt("r_center", [&] { row.rc = decay_exponent(s, Location::center, cfg.fit_lo, cfg.fit_hi); });
  attempt("r_side", [&] { row.rs = decay_exponent(s, Location::side, cfg.fit_lo, cfg.fit_hi); });
  return row;
}

json fit_json(const FitResult& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"rms", f.rms}, {"points", f.points},
          {"window", {f.n_lo, f.n_hi}}, {"auto_selected", f.auto_selected}, {"slope_spread", f.slope_spread}};
}

int cmd_characteristics(const Run& r) {
  const auto& cfg = r.cfg;
  if (cfg.steps < std::max(cfg.fit_hi, cfg.ratio_hi))
    throw std::invalid_argument("characteristics: steps must cover fit_hi and ratio_hi");
  std::vector<CharRow> rows(cfg.m_list.size());
  std::vector<std::string> errors(cfg.m_list.size());
  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= rows.size()) return;
        i = next++;
      }
      try {
        rows[i] = characteristics_for(cfg, cfg.m_list[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min<int>(r.workers, int(rows.size())); ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) throw std::runtime_error("M = " + std::to_string(cfg.m_list[i]) + ": " + errors[i]);

  CsvWriter csv(r.out / "characteristics.csv", "M,n_crit,xmax,ratio,gamma,r_center,r_side", r.hash);
  json side = json::array();
  Checks ch;
  for (const auto& row : rows) {
    csv.row(row.M, row.n_crit, row.xmax, row.ratio, row.gamma.slope, row.rc.slope, row.rs.slope);
    side.push_back({{"M", row.M},
                    {"gamma", fit_json(row.gamma)},
                    {"gamma_thresholds", row.gamma_by_threshold},
                    {"r_center", fit_json(row.rc)},
                    {"r_side", fit_json(row.rs)},
                    {"notes", row.notes}});
    const int nm = std::max(cfg.ncrit_nmax, 4 * row.M);
    if (row.M == 1) ch.add("n_crit(1) = n_max", row.n_crit == nm, row.n_crit, nm);
    else if (row.M <= 20) {
      const int want = row.M % 2 ? 2 * row.M : 3 * row.M;
      ch.add("n_crit(" + std::to_string(row.M) + ") near " + std::to_string(want), std::abs(row.n_crit - want) <= 2,
             row.n_crit, want);
    }
  }
  json rep{{"delta", cfg.delta},
           {"thresholds", {cfg.support_threshold, 1e-10, 1e-14}},
           {"fit_window", {cfg.fit_lo, cfg.fit_hi}},
           {"ratio_window", {cfg.ratio_lo, cfg.ratio_hi}},
           {"rows", side}};
  return finish(r, "characteristics", rep, ch);
}

int cmd_oracle_check(const Run& r) {
  const Coin coin = coin_of(r.cfg);
  const Vec2 g_up(1, 0), g_diag(std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2);
  double e1 = 0, e2 = 0;
  for (const Vec2& g : {g_up, g_diag}) {
    auto st = init_product(coin, g, stripe_for_width(101), 50);
    UnitaryWalk1D w(coin, g);
    for (int n = 1; n <= 50; ++n) {
      st.step();
      w.step();
      const auto m = measure(st);
      const auto p = w.distribution();
      for (int x = -n; x <= n; ++x) e1 = std::max(e1, std::abs(m.at(x) - p.at(x)));
    }
    auto s1 = init_product(coin, g, {0, 0}, 500);
    CorrelatedWalk c(coin, g);
    for (int n = 1; n <= 500; ++n) {
      s1.step();
      c.step();
      const auto m = measure(s1);
      const auto p = c.distribution();
      for (int x = -n; x <= n; ++x) e2 = std::max(e2, std::abs(m.at(x) - p.at(x)));
    }
  }
  Checks ch;
  ch.add("wide band vs 1D walk, n <= 50", e1 <= 1e-12, e1, 1e-12);
  ch.add("width one vs correlated walk, n <= 500", e2 <= 1e-12, e2, 1e-12);
  return finish(r, "oracle-check", json::object(), ch);
}

int cmd_sweep(const Run& r) {
  const auto& cfg = r.cfg;
  CsvWriter csv(r.out / "sweep.csv", "M,n,re_sum,im_sum,max_abs_im,min_re,norm", r.hash);
  for (int M : cfg.m_list) {
    RunConfig one = cfg;
    one.s.reset();
    one.t.reset();
    one.width = M;
    one.band.clear();
    BandState st = initial_state(one, cfg.steps);
    for (int n = 0;; ++n) {
      const auto m = measure(st);
      csv.row(M, n, m.sum().real(), m.sum().imag(), m.max_imag(), m.min_real(), st.norm());
      if (n == cfg.steps) {
        write_measure_csv(r.out / ("measure_M" + std::to_string(M) + ".csv"), m, r.hash);
        break;
      }
      st.step(Kernel::rank1, r.workers);
    }
  }
  return finish(r, "sweep", {{"m_list", cfg.m_list}, {"steps", cfg.steps}}, {});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dcqw: quantum walks on a diagonal band"};
  app.require_subcommand(1);
  Common common;
  std::map<std::string, int (*)(const Run&)> handlers{
      {"simulate", cmd_simulate},   {"spectrum", cmd_spectrum},           {"kato", cmd_kato},
      {"limits", cmd_limits},       {"characteristics", cmd_characteristics}, {"oracle-check", cmd_oracle_check},
      {"sweep", cmd_sweep}};
  const std::map<std::string, std::string> help{
      {"simulate", "evolve and write measure CSVs"},
      {"spectrum", "eigenvalues of W(k) over a k grid"},
      {"kato", "degenerate perturbation report at k = 0"},
      {"limits", "compare a run with its limit law"},
      {"characteristics", "n_crit, peak, ratio and exponent table"},
      {"oracle-check", "band engine against the reference walks"},
      {"sweep", "simulate every width in m_list"}};
  for (const auto& [name, fn] : handlers) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", common.config_path, "run configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory (overrides config)");
    sub->add_option("--workers", common.workers, "worker threads");
    sub->add_flag("--seedless", common.seedless, "assert that no random numbers are used");
  }
  CLI11_PARSE(app, argc, argv);
  try {
    for (const auto& [name, fn] : handlers)
      if (app.got_subcommand(name)) return fn(setup(common));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dcqw: %s\n", e.what());
    return 2;
  }
  return 2;
}
