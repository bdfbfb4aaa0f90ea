#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "coin.hpp"
#include "linalg.hpp"
#include "walker.hpp"

namespace dcqw {

// Block-tridiagonal momentum-space operator on rows v = s, ..., t (ascending):
//   diagonal V(k) = e^{-ik} PP + e^{ik} QQ, PQ couples to row v+1, QP to row v-1.
struct WOperator {
  Stripe stripe;
  double k = 0.0;
  MatX matrix;
  int width() const { return stripe.width(); }
};

template <class T = double>
MatXT<T> w_matrix(const Coin& coin, Stripe stripe, T k) {
  check_stripe(stripe);
  using C = std::complex<T>;
  const auto bl = blocks_as<T>(coin);
  const int M = stripe.width();
  const C e_minus = std::polar(T(1), -k), e_plus = std::polar(T(1), k);
  const Mat4T<T> V = e_minus * bl.PP + e_plus * bl.QQ;
  MatXT<T> W = MatXT<T>::Zero(4 * M, 4 * M);
  for (int i = 0; i < M; ++i) {
    W.template block<4, 4>(4 * i, 4 * i) = V;
    if (i + 1 < M) W.template block<4, 4>(4 * i, 4 * (i + 1)) = bl.PQ;
    if (i > 0) W.template block<4, 4>(4 * i, 4 * (i - 1)) = bl.QP;
  }
  return W;
}

inline WOperator build_w(const Coin& coin, int s, int t, double k) {
  return {{s, t}, k, w_matrix<double>(coin, {s, t}, k)};
}

inline EigenSystem<double> eig(const WOperator& W, const EigOptions& opt = {}) {
  return eig<double>(W.matrix, opt);
}

// delta^2 / 2 = 1 - cos k
template <class T = double>
T delta_of_k(T k) {
  return T(2) * std::abs(std::sin(k / T(2)));
}
template <class T = double>
T k_of_delta(T delta) {
  return T(2) * std::asin(delta / T(2));
}

// Hadamard, M = 2:
//   2 l^3 + (1 - 2c) l^2 - 1 = 0  and  2 l^3 - (1 + 2c) l^2 + 1 = 0,  c = cos k
struct CubicSpectrum {
  std::array<cplx, 3> first, second;

  std::vector<cplx> with_zeros() const {
    std::vector<cplx> all{0.0, 0.0};
    all.insert(all.end(), first.begin(), first.end());
    all.insert(all.end(), second.begin(), second.end());
    return all;
  }
};

inline cplx cubic_first(double k, cplx z) { return (2.0 * z + (1.0 - 2.0 * std::cos(k))) * z * z - 1.0; }
inline cplx cubic_second(double k, cplx z) { return (2.0 * z - (1.0 + 2.0 * std::cos(k))) * z * z + 1.0; }

inline CubicSpectrum cubic_spectrum_m2(double k) {
  const double c = std::cos(k);
  return {cubic_roots(2.0, 1.0 - 2.0 * c, 0.0, -1.0), cubic_roots(2.0, -(1.0 + 2.0 * c), 0.0, 1.0)};
}

// Closed-form Cardano roots on the real cube-root branch; cross-check only.
struct CardanoBranch {
  double lambda1;  // root of the first cubic
  double lambda2;  // root of the second cubic
};

inline CardanoBranch cardano_branch0(double k) {
  const double r = std::cos(k), s6 = std::sqrt(6.0);
  const double eta = 53 + 6 * r - 12 * r * r + 8 * r * r * r +
                     6 * s6 * std::sqrt(std::max(0.0, 13 + 3 * r - 6 * r * r + 4 * r * r * r));
  const double zeta = -53 + 6 * r + 12 * r * r + 8 * r * r * r +
                      6 * s6 * std::sqrt(std::max(0.0, 13 - 3 * r - 6 * r * r - 4 * r * r * r));
  const double e3 = std::cbrt(eta), z3 = std::cbrt(zeta);
  const double p = 2 * r - 1, q = 2 * r + 1;
  return {(p + p * p / e3 + e3) / 6.0, (q + q * q / z3 + z3) / 6.0};
}

// 1 - delta^2/4
template <class T = double>
T lambda1_expansion(T k) {
  const T d = delta_of_k(k);
  return T(1) - d * d / T(4);
}

// 1 +- (i/sqrt3) delta - (2/9) delta^2
template <class T = double>
std::array<std::complex<T>, 2> lambda2_expansion(T k) {
  const T d = delta_of_k(k);
  const T re = T(1) - T(2) * d * d / T(9), im = d / std::sqrt(T(3));
  return {std::complex<T>(re, im), std::complex<T>(re, -im)};
}

// Exact eigenvalues of W(k(delta)) nearest the three predictions (lambda1, lambda2+, lambda2-).
template <class T>
struct ExpansionErrors {
  T delta;
  std::array<std::complex<T>, 3> exact, predicted;
  std::array<T, 3> error;
};

template <class T = double>
ExpansionErrors<T> expansion_errors(const Coin& coin, T delta) {
  const T k = k_of_delta(delta);
  const auto es = eig<T>(w_matrix<T>(coin, {-1, 0}, k));
  ExpansionErrors<T> out{};
  out.delta = delta;
  const auto l2 = lambda2_expansion(k);
  out.predicted = {std::complex<T>(lambda1_expansion(k)), l2[0], l2[1]};
  for (int j = 0; j < 3; ++j) {
    T best = std::numeric_limits<T>::infinity();
    for (const auto& lam : es.values)
      if (std::abs(lam - out.predicted[std::size_t(j)]) < best) {
        best = std::abs(lam - out.predicted[std::size_t(j)]);
        out.exact[std::size_t(j)] = lam;
      }
    out.error[std::size_t(j)] = best;
  }
  return out;
}

struct KatoReduction {
  Coin coin;
  Stripe stripe;
  bool closed_form = false;
  MatX Pi, T1, R;
  std::vector<VecX> phi;              // ONB of range(Pi)
  std::vector<cplx> values;           // eigenvalues of R on range(Pi): 0, +i/sqrt3, -i/sqrt3
  std::vector<VecX> v;                // matching unit eigenvectors
  double idempotence_residual = 0;    // ||Pi^2 - Pi||
  double hermitian_residual = 0;      // ||Pi^* - Pi||
  double commutator_residual = 0;     // ||Pi W - W Pi||
  double skew_residual = 0;           // ||R^* + R||
  double eigen_residual = 0;          // max ||R v - l v||
  double orthonormality_residual = 0; // ||V^* V - I||
  double range_residual = 0;          // max ||Pi v - v||
  int rank = 0;
};

inline MatX t1_exact(const Coin& coin, Stripe stripe) {
  const auto bl = blocks(coin);
  const Mat4 t1 = cplx(0, -1) * bl.PP + cplx(0, 1) * bl.QQ;
  const int M = stripe.width();
  MatX T1 = MatX::Zero(4 * M, 4 * M);
  for (int i = 0; i < M; ++i) T1.block<4, 4>(4 * i, 4 * i) = t1;
  return T1;
}

inline MatX t1_numeric(const Coin& coin, Stripe stripe, double h = 1e-5) {
  return (w_matrix<double>(coin, stripe, h) - w_matrix<double>(coin, stripe, -h)) / (2.0 * h);
}

// Riesz projection (1/2 pi i) \oint (z - W)^{-1} dz around the eigenvalue 1.
inline MatX total_projection(const MatX& W, int points = 128) {
  const auto es = eig<double>(W);
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& lam : es.values)
    if (std::abs(lam - 1.0) > 1e-6) gap = std::min(gap, std::abs(lam - 1.0));
  if (!std::isfinite(gap)) gap = 1.0;
  const double r = gap / 2;
  const auto N = W.rows();
  MatX Pi = MatX::Zero(N, N);
  for (int j = 0; j < points; ++j) {
    const cplx e = std::polar(1.0, 2 * std::numbers::pi * j / points);
    const cplx z = 1.0 + r * e;
    Pi += (r * e) * (z * MatX::Identity(N, N) - W).inverse();
  }
  return Pi / double(points);
}

inline std::vector<VecX> hadamard_onb() {
  const double s2 = 1 / std::sqrt(2.0), a = 1 / (2 * std::sqrt(3.0)), b = 1 / std::sqrt(3.0);
  VecX p1(8), p2(8), p3(8);
  p1 << 0, 0, 0, 0, s2, 0, 0, s2;
  p2 << a, 0, b, -a, a, b, 0, -a;
  p3 << s2, 0, 0, s2, 0, 0, 0, 0;
  return {p1, p2, p3};
}

inline KatoReduction kato_reduction(const Coin& coin = make_hadamard(), Stripe stripe = {-1, 0},
                                    bool force_numeric = false) {
  check_stripe(stripe);
  KatoReduction kr;
  kr.coin = coin;
  kr.stripe = stripe;
  kr.closed_form = !force_numeric && is_hadamard(coin) && stripe == Stripe{-1, 0};
  const MatX W0 = w_matrix<double>(coin, stripe, 0.0);
  const auto N = W0.rows();

  if (kr.closed_form) {
    kr.phi = hadamard_onb();
    kr.Pi = MatX::Zero(N, N);
    for (const auto& p : kr.phi) kr.Pi += p * p.adjoint();
    kr.T1 = t1_exact(coin, stripe);
  } else {
    kr.Pi = total_projection(W0);
    kr.T1 = t1_numeric(coin, stripe);
    const int rank = int(std::lround(kr.Pi.trace().real()));
    Eigen::JacobiSVD<MatX> svd(kr.Pi, Eigen::ComputeThinU);
    for (int j = 0; j < rank; ++j) kr.phi.push_back(svd.matrixU().col(j));
  }
  kr.rank = int(kr.phi.size());
  kr.R = kr.Pi * kr.T1 * kr.Pi;

  kr.idempotence_residual = (kr.Pi * kr.Pi - kr.Pi).norm();
  kr.hermitian_residual = (kr.Pi.adjoint() - kr.Pi).norm();
  kr.commutator_residual = (kr.Pi * W0 - W0 * kr.Pi).norm();
  kr.skew_residual = (kr.R.adjoint() + kr.R).norm();

  MatX Phi(N, kr.rank);
  for (int j = 0; j < kr.rank; ++j) Phi.col(j) = kr.phi[std::size_t(j)];
  const MatX R3 = Phi.adjoint() * kr.R * Phi;
  Eigen::ComplexEigenSolver<MatX> es(R3, true);
  if (es.info() != Eigen::Success) throw convergence_error("kato_reduction: reduced eigenproblem failed");

  std::vector<int> order(std::size_t(kr.rank));
  for (int j = 0; j < kr.rank; ++j) order[std::size_t(j)] = j;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return es.eigenvalues()(a).imag() > es.eigenvalues()(b).imag(); });
  if (kr.rank == 3) order = {order[1], order[0], order[2]};  // 0, +, -

  for (int j : order) {
    VecX vec = Phi * es.eigenvectors().col(j);
    vec.normalize();
    Eigen::Index ref = 0;
    while (ref + 1 < vec.size() && std::abs(vec(ref)) < 1e-8) ++ref;
    vec *= std::conj(vec(ref)) / std::abs(vec(ref));
    kr.values.push_back(es.eigenvalues()(j));
    kr.v.push_back(vec);
  }
  for (std::size_t j = 0; j < kr.v.size(); ++j) {
    kr.eigen_residual = std::max(kr.eigen_residual, (kr.R * kr.v[j] - kr.values[j] * kr.v[j]).norm());
    kr.range_residual = std::max(kr.range_residual, (kr.Pi * kr.v[j] - kr.v[j]).norm());
  }
  MatX V(N, kr.rank);
  for (int j = 0; j < kr.rank; ++j) V.col(j) = kr.v[std::size_t(j)];
  kr.orthonormality_residual = (V.adjoint() * V - MatX::Identity(kr.rank, kr.rank)).norm();
  return kr;
}

// Polynomial in W given by real factor coefficient lists (lowest degree first).
inline MatX poly_product(const MatX& W, const std::vector<std::vector<double>>& factors) {
  const auto N = W.rows();
  MatX acc = MatX::Identity(N, N);
  for (const auto& f : factors) {
    MatX term = MatX::Zero(N, N), pw = MatX::Identity(N, N);
    for (double c : f) {
      term += c * pw;
      pw = pw * W;
    }
    acc = acc * term;
  }
  return acc;
}

// l (l - 1) (2l^2 + l + 1) (2l + 1)
inline double minimal_poly_residual(const Coin& coin, int s, int t) {
  const MatX W = w_matrix<double>(coin, {s, t}, 0.0);
  return poly_product(W, {{0, 1}, {-1, 1}, {1, 1, 2}, {1, 2}}).norm();
}

// l^2 (l - 1)^3 (2l^2 + l + 1) (2l + 1)
inline double characteristic_poly_residual(const Coin& coin, int s, int t) {
  const MatX W = w_matrix<double>(coin, {s, t}, 0.0);
  return poly_product(W, {{0, 1}, {0, 1}, {-1, 1}, {-1, 1}, {-1, 1}, {1, 1, 2}, {1, 2}}).norm();
}

// minimal polynomial with the (2l + 1) factor dropped; must not vanish
inline double minimality_witness(const Coin& coin, int s, int t) {
  const MatX W = w_matrix<double>(coin, {s, t}, 0.0);
  return poly_product(W, {{0, 1}, {-1, 1}, {1, 1, 2}}).norm();
}

struct ProjectionCheck {
  double delta = 0;
  std::array<cplx, 3> eigenvalue{};
  std::array<double, 3> residual{};
};

// ||Pi_j(delta) - v_j v_j^*||_F with Pi_j = r_j l_j^*, l_j^* r_j = 1.
inline ProjectionCheck perturbed_projection_check(double delta, const KatoReduction& kr,
                                                  double tie_tol = 1e-6) {
  if (kr.v.size() != 3) throw std::invalid_argument("projection check needs a rank-3 reduction");
  if (delta < 0 || delta > 0.3) throw std::invalid_argument("delta must lie in [0, 0.3]");
  ProjectionCheck out;
  out.delta = delta;
  if (delta == 0) {
    // reduced problem: spectral projections of R on range(Pi)
    MatX Phi(kr.Pi.rows(), 3);
    for (int j = 0; j < 3; ++j) Phi.col(j) = kr.phi[std::size_t(j)];
    const auto es3 = eig<double>(MatX(Phi.adjoint() * kr.R * Phi));
    for (int j = 0; j < 3; ++j) {
      std::size_t i = 0;
      for (std::size_t c = 1; c < 3; ++c)
        if (std::abs(es3.values[c] - kr.values[std::size_t(j)]) <
            std::abs(es3.values[i] - kr.values[std::size_t(j)]))
          i = c;
      const VecX r = Phi * es3.right.col(Eigen::Index(i)), l = Phi * es3.left.col(Eigen::Index(i));
      const VecX& vj = kr.v[std::size_t(j)];
      out.eigenvalue[std::size_t(j)] = 1.0;
      out.residual[std::size_t(j)] = (r * l.adjoint() - vj * vj.adjoint()).norm();
    }
    return out;
  }
  const double k = k_of_delta(delta);
  const auto es = eig<double>(w_matrix<double>(kr.coin, kr.stripe, k));
  if (!es.left_valid) throw std::runtime_error("projection check: defective eigenvalue cluster");
  std::array<cplx, 3> pred;
  if (kr.closed_form) {
    const auto l2 = lambda2_expansion(k);
    pred = {lambda1_expansion(k), l2[0], l2[1]};
  } else {
    for (int j = 0; j < 3; ++j) pred[std::size_t(j)] = 1.0 + kr.values[std::size_t(j)] * k;
  }
  std::vector<std::size_t> taken;
  for (int j = 0; j < 3; ++j) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t i = 0; i < es.values.size(); ++i)
      d.push_back({std::abs(es.values[i] - pred[std::size_t(j)]), i});
    std::sort(d.begin(), d.end());
    if (d[1].first - d[0].first < tie_tol)
      throw std::runtime_error("projection check: ambiguous eigenvalue match at delta = " + fmt_num(delta));
    const std::size_t i = d[0].second;
    if (std::find(taken.begin(), taken.end(), i) != taken.end())
      throw std::runtime_error("projection check: two predictions matched the same eigenvalue");
    taken.push_back(i);
    const VecX r = es.right.col(Eigen::Index(i)), l = es.left.col(Eigen::Index(i));
    const VecX& vj = kr.v[std::size_t(j)];
    out.eigenvalue[std::size_t(j)] = es.values[i];
    out.residual[std::size_t(j)] = (r * l.adjoint() - vj * vj.adjoint()).norm();
  }
  return out;
}

// <q0, W^n(k) phi0>, q0 = LL + RR on row v = 0, phi0 = (Hg) (x) conj(Hg) on row v = 0.
inline cplx characteristic_function(const Coin& coin, Stripe stripe, const Vec2& g, int n, double k) {
  check_unit(g);
  const MatX W = w_matrix<double>(coin, stripe, k);
  const Eigen::Index row = 4 * Eigen::Index(-stripe.s);
  VecX phi0 = VecX::Zero(W.rows());
  const Vec2 h = coin.matrix() * g;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) phi0(row + 2 * i + j) = h(i) * std::conj(h(j));
  const VecX x = matrix_power<double>(W, n) * phi0;
  return x(row) + x(row + 3);
}

// sum_x mu(x) e^{ikx}
inline cplx fourier_sum(const ComplexMeasure& m, double k) {
  cplx acc = 0.0;
  for (int x = m.x_min; x <= m.x_max(); ++x) acc += m.at(x) * std::polar(1.0, k * x);
  return acc;
}

}  // namespace dcqw
