#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "coin.hpp"
#include "walker.hpp"

namespace dcqw {

// Flat key = value run configuration; complex numbers are "re,im".
struct RunConfig {
  std::string coin = "hadamard";           // "hadamard" or "entries"
  std::vector<cplx> coin_entries;          // a b c d when coin == "entries"
  int width = 2;                           // used unless s/t are given
  std::optional<int> s, t;
  std::vector<cplx> g{std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2};
  std::vector<cplx> band;                  // optional 4M initial band vector, rows v = s..t
  int steps = 100;
  std::vector<int> snapshots;              // empty: final step only
  std::string out = "out";
  bool band_field = false;
  std::string kernel = "rank1";
  double unitarity_tol = 1e-10;
  double support_threshold = 1e-12;
  double ncrit_tol = 1e-13;
  int ncrit_nmax = 200;
  double window_w = 4.0;
  double delta = 0.3;
  double side_variance = 4.0 / 9.0;
  int k_points = 64;
  std::vector<int> m_list{1, 2, 3, 4, 5};
  int fit_lo = 1000, fit_hi = 2000;
  int ratio_lo = 1001, ratio_hi = 2000;
};

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_complex(cplx z) { return fmt17(z.real()) + "," + fmt17(z.imag()); }

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& s, const std::string& key) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) throw std::invalid_argument("config: bad number '" + s + "' for " + key);
  return v;
}

inline int to_int(const std::string& s, const std::string& key) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) throw std::invalid_argument("config: bad integer '" + s + "' for " + key);
  return v;
}

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

inline cplx to_complex(const std::string& s, const std::string& key) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) return to_double(s, key);
  return {to_double(s.substr(0, comma), key), to_double(s.substr(comma + 1), key)};
}

inline std::vector<cplx> to_complex_list(const std::string& s, const std::string& key) {
  std::vector<cplx> out;
  for (const auto& w : words(s)) out.push_back(to_complex(w, key));
  return out;
}

inline std::vector<int> to_int_list(const std::string& s, const std::string& key) {
  std::vector<int> out;
  for (const auto& w : words(s)) out.push_back(to_int(w, key));
  return out;
}

inline bool to_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("config: bad boolean '" + s + "' for " + key);
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  using namespace detail;
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key == "coin") {
      if (val == "hadamard") {
        c.coin = "hadamard";
        c.coin_entries.clear();
      } else {
        c.coin = "entries";
        c.coin_entries = to_complex_list(val, key);
        if (c.coin_entries.size() != 4) throw std::invalid_argument("config: coin needs 4 complex entries");
      }
    } else if (key == "width") c.width = to_int(val, key);
    else if (key == "s") c.s = to_int(val, key);
    else if (key == "t") c.t = to_int(val, key);
    else if (key == "g") {
      c.g = to_complex_list(val, key);
      if (c.g.size() != 2) throw std::invalid_argument("config: g needs 2 complex entries");
    } else if (key == "band") c.band = to_complex_list(val, key);
    else if (key == "steps") c.steps = to_int(val, key);
    else if (key == "snapshots") c.snapshots = to_int_list(val, key);
    else if (key == "out") c.out = val;
    else if (key == "band_field") c.band_field = to_bool(val, key);
    else if (key == "kernel") {
      if (val != "rank1" && val != "dense") throw std::invalid_argument("config: kernel must be rank1 or dense");
      c.kernel = val;
    } else if (key == "unitarity_tol") c.unitarity_tol = to_double(val, key);
    else if (key == "support_threshold") c.support_threshold = to_double(val, key);
    else if (key == "ncrit_tol") c.ncrit_tol = to_double(val, key);
    else if (key == "ncrit_nmax") c.ncrit_nmax = to_int(val, key);
    else if (key == "window_w") c.window_w = to_double(val, key);
    else if (key == "delta") c.delta = to_double(val, key);
    else if (key == "side_variance") c.side_variance = to_double(val, key);
    else if (key == "k_points") c.k_points = to_int(val, key);
    else if (key == "m_list") c.m_list = to_int_list(val, key);
    else if (key == "fit_lo") c.fit_lo = to_int(val, key);
    else if (key == "fit_hi") c.fit_hi = to_int(val, key);
    else if (key == "ratio_lo") c.ratio_lo = to_int(val, key);
    else if (key == "ratio_hi") c.ratio_hi = to_int(val, key);
    else throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (c.s.has_value() != c.t.has_value()) throw std::invalid_argument("config: s and t must be given together");
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

// Canonical encoding with every default written out.
inline std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  auto list = [](const auto& v, auto f) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + f(v[i]);
    return s;
  };
  auto cl = [&](const std::vector<cplx>& v) { return list(v, fmt_complex); };
  auto il = [&](const std::vector<int>& v) { return list(v, [](int x) { return std::to_string(x); }); };
  o << "coin = " << (c.coin == "hadamard" ? std::string("hadamard") : cl(c.coin_entries)) << "\n";
  o << "width = " << c.width << "\n";
  if (c.s) o << "s = " << *c.s << "\nt = " << *c.t << "\n";
  o << "g = " << cl(c.g) << "\n";
  if (!c.band.empty()) o << "band = " << cl(c.band) << "\n";
  o << "steps = " << c.steps << "\n";
  if (!c.snapshots.empty()) o << "snapshots = " << il(c.snapshots) << "\n";
  o << "out = " << c.out << "\n";
  o << "band_field = " << (c.band_field ? "true" : "false") << "\n";
  o << "kernel = " << c.kernel << "\n";
  o << "unitarity_tol = " << fmt17(c.unitarity_tol) << "\n";
  o << "support_threshold = " << fmt17(c.support_threshold) << "\n";
  o << "ncrit_tol = " << fmt17(c.ncrit_tol) << "\n";
  o << "ncrit_nmax = " << c.ncrit_nmax << "\n";
  o << "window_w = " << fmt17(c.window_w) << "\n";
  o << "delta = " << fmt17(c.delta) << "\n";
  o << "side_variance = " << fmt17(c.side_variance) << "\n";
  o << "k_points = " << c.k_points << "\n";
  o << "m_list = " << il(c.m_list) << "\n";
  o << "fit_lo = " << c.fit_lo << "\nfit_hi = " << c.fit_hi << "\n";
  o << "ratio_lo = " << c.ratio_lo << "\nratio_hi = " << c.ratio_hi << "\n";
  return o.str();
}

// FNV-1a over the canonical encoding; the output directory is not part of the run.
inline std::string config_hash(const RunConfig& c) {
  RunConfig k = c;
  k.out.clear();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : to_text(k)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Coin coin_of(const RunConfig& c) {
  if (c.coin == "hadamard") return make_hadamard();
  const auto& e = c.coin_entries;
  return make_coin(e.at(0), e.at(1), e.at(2), e.at(3), c.unitarity_tol);
}

inline Stripe stripe_of(const RunConfig& c) {
  if (c.s) {
    Stripe st{*c.s, *c.t};
    check_stripe(st);
    return st;
  }
  return stripe_for_width(c.width);
}

inline Vec2 g_of(const RunConfig& c) { return Vec2(c.g.at(0), c.g.at(1)); }

}  // namespace dcqw
