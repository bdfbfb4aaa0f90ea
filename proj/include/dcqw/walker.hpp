#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "coin.hpp"

namespace dcqw {

// Transverse band v in {s, ..., t}; M = t - s + 1.
struct Stripe {
  int s = 0;
  int t = 0;
  int width() const { return t - s + 1; }
  bool operator==(const Stripe&) const = default;
};

inline void check_stripe(const Stripe& st) {
  if (st.s > 0 || st.t < 0)
    throw std::invalid_argument("stripe must satisfy s <= 0 <= t");
}

// odd M: (-(M-1)/2, (M-1)/2), even M: (-M/2, M/2 - 1)
inline Stripe stripe_for_width(int M) {
  if (M < 1) throw std::invalid_argument("stripe width must be >= 1");
  if (M % 2) return {-(M - 1) / 2, (M - 1) / 2};
  return {-M / 2, M / 2 - 1};
}

inline void check_unit(const Vec2& g, double tol = 1e-10) {
  if (std::abs(g.norm() - 1.0) > tol)
    throw std::invalid_argument("initial spinor must have unit norm, got " + fmt_num(g.norm()));
}

// Diagonal measure mu_n(x) for x in [x_min, x_min + size).
struct ComplexMeasure {
  int n = 0;
  Stripe stripe;
  bool unbounded = false;  // produced by the untruncated 1D walk
  int x_min = 0;
  std::vector<cplx> values;

  int x_max() const { return x_min + int(values.size()) - 1; }
  cplx at(int x) const {
    if (x < x_min || x > x_max()) return 0.0;
    return values[std::size_t(x - x_min)];
  }
  cplx sum() const {
    cplx acc = 0.0;
    for (const auto& z : values) acc += z;
    return acc;
  }
  double max_imag() const {
    double m = 0.0;
    for (const auto& z : values) m = std::max(m, std::abs(z.imag()));
    return m;
  }
  double min_real() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& z : values) m = std::min(m, z.real());
    return m;
  }
};

struct FieldCell {
  int x, y;
  cplx value;
};

enum class Kernel { dense, rank1 };

// Dirichlet-cut walk in rotated coordinates x = u + v, y = u - v.
class BandState {
 public:
  BandState(const Coin& coin, Stripe stripe, int n_max)
      : coin_(coin), bl_(blocks(coin)), st_(stripe), n_max_(n_max) {
    check_stripe(stripe);
    if (n_max < 0) throw std::invalid_argument("horizon must be non-negative");
    M_ = stripe.width();
    // one zero pad row on each side of [-n_max, n_max]
    const std::size_t cells = std::size_t(2 * n_max_ + 3) * std::size_t(M_);
    cur_.assign(cells, Vec4::Zero());
    next_.assign(cells, Vec4::Zero());
  }

  int n() const { return n_; }
  int n_max() const { return n_max_; }
  int width() const { return M_; }
  Stripe stripe() const { return st_; }
  const Coin& coin() const { return coin_; }
  const CoinBlocks& coin_blocks() const { return bl_; }

  const Vec4& cell(int u, int v) const { return cur_[index(u, v)]; }
  Vec4& cell(int u, int v) { return cur_[index(u, v)]; }

  double norm() const {
    double acc = 0.0;
    for (int u = -n_; u <= n_; ++u)
      for (int v = st_.s; v <= st_.t; ++v) acc += cell(u, v).squaredNorm();
    return std::sqrt(acc);
  }

  void step(Kernel kernel = Kernel::rank1, int workers = 1) {
    if (n_ >= n_max_)
      throw horizon_error("step beyond allocated horizon n_max = " + std::to_string(n_max_));
    const int lo = -(n_ + 1), hi = n_ + 1;
    const int rows = hi - lo + 1;
    workers = std::clamp(workers, 1, rows);
    auto run = [&](int a, int b) {
      if (kernel == Kernel::dense)
        step_rows_dense(a, b);
      else
        step_rows_rank1(a, b);
    };
    if (workers == 1) {
      run(lo, hi);
    } else {
      std::vector<std::thread> pool;
      const int chunk = (rows + workers - 1) / workers;
      for (int w = 1; w < workers; ++w) {
        int a = lo + w * chunk, b = std::min(hi, a + chunk - 1);
        if (a <= b) pool.emplace_back(run, a, b);
      }
      run(lo, std::min(hi, lo + chunk - 1));
      for (auto& th : pool) th.join();
    }
    std::swap(cur_, next_);
    ++n_;
  }

 private:
  std::size_t index(int u, int v) const {
    return std::size_t(u + n_max_ + 1) * std::size_t(M_) + std::size_t(v - st_.s);
  }

  void step_rows_dense(int a, int b) {
    for (int u = a; u <= b; ++u)
      for (int v = st_.s; v <= st_.t; ++v) {
        Vec4 out = bl_.PP * cur_[index(u + 1, v)] + bl_.QQ * cur_[index(u - 1, v)];
        if (v < st_.t) out += bl_.PQ * cur_[index(u, v + 1)];
        if (v > st_.s) out += bl_.QP * cur_[index(u, v - 1)];
        next_[index(u, v)] = out;
      }
  }

  // Each block has a single nonzero column: PP at LL, QQ at RR, PQ at LR, QP at RL.
  void step_rows_rank1(int a, int b) {
    const Vec4 pp = bl_.PP.col(0), qq = bl_.QQ.col(3), pq = bl_.PQ.col(1), qp = bl_.QP.col(2);
    for (int u = a; u <= b; ++u)
      for (int v = st_.s; v <= st_.t; ++v) {
        Vec4 out = pp * cur_[index(u + 1, v)](0) + qq * cur_[index(u - 1, v)](3);
        if (v < st_.t) out += pq * cur_[index(u, v + 1)](1);
        if (v > st_.s) out += qp * cur_[index(u, v - 1)](2);
        next_[index(u, v)] = out;
      }
  }

  Coin coin_;
  CoinBlocks bl_;
  Stripe st_;
  int n_max_;
  int M_ = 1;
  int n_ = 0;
  std::vector<Vec4> cur_, next_;
};

// Cell (0, 0) = (Hg) (x) conj(Hg).
inline BandState init_product(const Coin& coin, const Vec2& g, Stripe stripe, int n_max) {
  check_unit(g);
  BandState st(coin, stripe, n_max);
  const Vec2 h = coin.matrix() * g;
  Vec4& c = st.cell(0, 0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c(2 * i + j) = h(i) * std::conj(h(j));
  return st;
}

// data[i] is placed at (u = 0, v = s + i); same row order as the momentum-space operator.
inline BandState init_band_vector(const Coin& coin, const std::vector<Vec4>& data, Stripe stripe,
                                  int n_max) {
  BandState st(coin, stripe, n_max);
  if (int(data.size()) != stripe.width())
    throw std::invalid_argument("band vector has " + std::to_string(data.size()) +
                                " blocks, stripe width is " + std::to_string(stripe.width()));
  for (int i = 0; i < stripe.width(); ++i) st.cell(0, stripe.s + i) = data[std::size_t(i)];
  return st;
}

// Flat 4M vector -> per-row blocks.
inline std::vector<Vec4> split_blocks(const VecX& flat) {
  if (flat.size() % 4) throw std::invalid_argument("band vector length must be a multiple of 4");
  std::vector<Vec4> out(std::size_t(flat.size() / 4));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = flat.segment<4>(Eigen::Index(4 * i));
  return out;
}

inline BandState step(BandState state, Kernel kernel = Kernel::rank1) {
  state.step(kernel);
  return state;
}

inline BandState evolve(BandState state, int steps, Kernel kernel = Kernel::rank1, int workers = 1) {
  for (int i = 0; i < steps; ++i) state.step(kernel, workers);
  return state;
}

inline ComplexMeasure measure(const BandState& st) {
  ComplexMeasure m;
  m.n = st.n();
  m.stripe = st.stripe();
  m.x_min = -st.n();
  m.values.resize(std::size_t(2 * st.n() + 1));
  for (int x = -st.n(); x <= st.n(); ++x) {
    const Vec4& c = st.cell(x, 0);
    m.values[std::size_t(x + st.n())] = c(0) + c(3);
  }
  return m;
}

// LL + RR over the whole band, keyed by (x, y).
inline std::vector<FieldCell> band_field(const BandState& st) {
  std::vector<FieldCell> out;
  out.reserve(std::size_t(2 * st.n() + 1) * std::size_t(st.width()));
  for (int u = -st.n(); u <= st.n(); ++u)
    for (int v = st.stripe().s; v <= st.stripe().t; ++v) {
      const Vec4& c = st.cell(u, v);
      out.push_back({u + v, u - v, c(0) + c(3)});
    }
  return out;
}

struct RealDistribution {
  int x_min = 0;
  std::vector<double> p;

  double at(int x) const {
    if (x < x_min || x >= x_min + int(p.size())) return 0.0;
    return p[std::size_t(x - x_min)];
  }
  double sum() const {
    double acc = 0.0;
    for (double v : p) acc += v;
    return acc;
  }
};

// (U psi)(x) = P' psi(x+1) + Q' psi(x-1)
class UnitaryWalk1D {
 public:
  UnitaryWalk1D(const Coin& coin, const Vec2& phi0) : bl_(blocks(coin)) {
    check_unit(phi0);
    psi_.assign(1, phi0);
  }

  int n() const { return n_; }

  void step() {
    std::vector<Vec2> out(std::size_t(2 * (n_ + 1) + 1), Vec2::Zero());
    auto at = [&](int x) -> Vec2 {
      if (x < -n_ || x > n_) return Vec2::Zero();
      return psi_[std::size_t(x + n_)];
    };
    for (int x = -(n_ + 1); x <= n_ + 1; ++x)
      out[std::size_t(x + n_ + 1)] = bl_.Pp * at(x + 1) + bl_.Qp * at(x - 1);
    psi_.swap(out);
    ++n_;
  }

  RealDistribution distribution() const {
    RealDistribution d{-n_, {}};
    d.p.reserve(psi_.size());
    for (const auto& v : psi_) d.p.push_back(v.squaredNorm());
    return d;
  }

  ComplexMeasure measure() const {
    ComplexMeasure m;
    m.n = n_;
    m.unbounded = true;
    m.x_min = -n_;
    for (const auto& v : psi_) m.values.emplace_back(v.squaredNorm(), 0.0);
    return m;
  }

 private:
  CoinBlocks bl_;
  int n_ = 0;
  std::vector<Vec2> psi_;
};

// p = (LL, RR) weights:
//   LL'(x) = |a|^2 LL(x+1) + |b|^2 RR(x-1)
//   RR'(x) = |c|^2 LL(x+1) + |d|^2 RR(x-1)
class CorrelatedWalk {
 public:
  CorrelatedWalk(const Coin& coin, const Vec2& g)
      : aa_(std::norm(coin.a)), bb_(std::norm(coin.b)), cc_(std::norm(coin.c)), dd_(std::norm(coin.d)) {
    check_unit(g);
    const Vec2 h = coin.matrix() * g;
    p_.push_back({std::norm(h(0)), std::norm(h(1))});
  }

  int n() const { return n_; }

  void step() {
    std::vector<std::array<double, 2>> out(std::size_t(2 * (n_ + 1) + 1), {0.0, 0.0});
    auto at = [&](int x) -> std::array<double, 2> {
      if (x < -n_ || x > n_) return {0.0, 0.0};
      return p_[std::size_t(x + n_)];
    };
    for (int x = -(n_ + 1); x <= n_ + 1; ++x) {
      auto r = at(x + 1), l = at(x - 1);
      out[std::size_t(x + n_ + 1)] = {aa_ * r[0] + bb_ * l[1], cc_ * r[0] + dd_ * l[1]};
    }
    p_.swap(out);
    ++n_;
  }

  RealDistribution distribution() const {
    RealDistribution d{-n_, {}};
    for (const auto& q : p_) d.p.push_back(q[0] + q[1]);
    return d;
  }

  ComplexMeasure measure() const {
    ComplexMeasure m;
    m.n = n_;
    m.stripe = {0, 0};
    m.x_min = -n_;
    for (const auto& q : p_) m.values.emplace_back(q[0] + q[1], 0.0);
    return m;
  }

 private:
  double aa_, bb_, cc_, dd_;
  int n_ = 0;
  std::vector<std::array<double, 2>> p_;
};

inline RealDistribution qw1d_reference(const Coin& coin, const Vec2& phi0, int n) {
  UnitaryWalk1D w(coin, phi0);
  for (int i = 0; i < n; ++i) w.step();
  return w.distribution();
}

inline RealDistribution oqrw_reference(const Coin& coin, const Vec2& g, int n) {
  CorrelatedWalk w(coin, g);
  for (int i = 0; i < n; ++i) w.step();
  return w.distribution();
}

}  // namespace dcqw
