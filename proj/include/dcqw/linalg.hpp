#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "types.hpp"

namespace dcqw {

template <class T>
struct EigenSystem {
  std::vector<std::complex<T>> values;
  MatXT<T> right;  // columns, unit 2-norm
  MatXT<T> left;   // columns, left.col(j)^* right.col(j) = 1 within each cluster
  std::vector<T> residuals;         // ||W r - lambda r|| / ||W||
  std::vector<int> multiplicity;    // algebraic, by clustering
  std::vector<int> cluster;         // cluster id per eigenvalue
  bool left_valid = true;           // false when a cluster is defective
  T norm = 0;                       // ||W||_2

  T max_residual() const {
    T m = 0;
    for (T r : residuals) m = std::max(m, r);
    return m;
  }
};

struct EigOptions {
  int size_limit = 256;
  double cluster_tol = 1e-8;
};

// Hessenberg reduction + shifted QR (Eigen::ComplexEigenSolver) on W and on W^*.
template <class T>
EigenSystem<T> eig(const MatXT<T>& W, const EigOptions& opt = {}) {
  const Eigen::Index N = W.rows();
  if (W.cols() != N) throw std::invalid_argument("eig: matrix must be square");
  if (N > opt.size_limit)
    throw std::invalid_argument("eig: size " + std::to_string(N) + " exceeds limit " +
                                std::to_string(opt.size_limit));
  Eigen::ComplexEigenSolver<MatXT<T>> es(W, true);
  if (es.info() != Eigen::Success)
    throw convergence_error("eig: QR iteration did not converge within " +
                            std::to_string(es.getMaxIterations() * N) + " iterations");
  Eigen::ComplexEigenSolver<MatXT<T>> ea(W.adjoint(), true);
  if (ea.info() != Eigen::Success)
    throw convergence_error("eig: QR iteration on the adjoint did not converge within " +
                            std::to_string(ea.getMaxIterations() * N) + " iterations");

  EigenSystem<T> out;
  out.norm = Eigen::JacobiSVD<MatXT<T>>(W).singularValues()(0);
  const T scale = out.norm > 0 ? out.norm : T(1);
  out.values.resize(std::size_t(N));
  out.right = es.eigenvectors();
  for (Eigen::Index j = 0; j < N; ++j) {
    out.values[std::size_t(j)] = es.eigenvalues()(j);
    out.right.col(j).normalize();
    out.residuals.push_back((W * out.right.col(j) - out.values[std::size_t(j)] * out.right.col(j)).norm() /
                            scale);
  }

  // cluster eigenvalues (single linkage)
  out.cluster.assign(std::size_t(N), -1);
  int next_id = 0;
  for (Eigen::Index i = 0; i < N; ++i) {
    if (out.cluster[std::size_t(i)] >= 0) continue;
    std::vector<Eigen::Index> stack{i};
    out.cluster[std::size_t(i)] = next_id;
    while (!stack.empty()) {
      auto a = stack.back();
      stack.pop_back();
      for (Eigen::Index b = 0; b < N; ++b)
        if (out.cluster[std::size_t(b)] < 0 &&
            std::abs(out.values[std::size_t(a)] - out.values[std::size_t(b)]) < opt.cluster_tol) {
          out.cluster[std::size_t(b)] = next_id;
          stack.push_back(b);
        }
    }
    ++next_id;
  }
  out.multiplicity.assign(std::size_t(N), 0);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j)
      if (out.cluster[std::size_t(i)] == out.cluster[std::size_t(j)]) ++out.multiplicity[std::size_t(i)];

  // Left vectors: adjoint eigenvectors matched to conj(lambda), biorthonormalised per cluster.
  out.left = MatXT<T>::Zero(N, N);
  std::vector<bool> used(std::size_t(N), false);
  for (int id = 0; id < next_id; ++id) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index j = 0; j < N; ++j)
      if (out.cluster[std::size_t(j)] == id) members.push_back(j);
    const auto m = Eigen::Index(members.size());
    MatXT<T> R(N, m), L(N, m);
    for (Eigen::Index c = 0; c < m; ++c) {
      const auto j = members[std::size_t(c)];
      R.col(c) = out.right.col(j);
      Eigen::Index best = -1;
      T best_d = std::numeric_limits<T>::infinity();
      for (Eigen::Index a = 0; a < N; ++a) {
        if (used[std::size_t(a)]) continue;
        T d = std::abs(std::conj(ea.eigenvalues()(a)) - out.values[std::size_t(j)]);
        if (d < best_d) best_d = d, best = a;
      }
      used[std::size_t(best)] = true;
      L.col(c) = ea.eigenvectors().col(best);
    }
    MatXT<T> G = L.adjoint() * R;
    Eigen::FullPivLU<MatXT<T>> lu(G);
    lu.setThreshold(T(1e-10));
    if (!lu.isInvertible()) {
      out.left_valid = false;
      continue;
    }
    MatXT<T> Lb = L * lu.inverse().adjoint();
    for (Eigen::Index c = 0; c < m; ++c) out.left.col(members[std::size_t(c)]) = Lb.col(c);
  }
  return out;
}

// Roots of c3 z^3 + c2 z^2 + c1 z + c0 (c3 != 0): Cardano, then Newton polish.
inline std::array<cplx, 3> cubic_roots(cplx c3, cplx c2, cplx c1, cplx c0) {
  if (c3 == 0.0) throw std::invalid_argument("cubic_roots: leading coefficient is zero");
  const cplx a = c2 / c3, b = c1 / c3, c = c0 / c3;
  // z = w - a/3, w^3 + p w + q = 0
  const cplx p = b - a * a / 3.0;
  const cplx q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const cplx disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  cplx u3 = -q / 2.0 + disc;
  if (std::abs(-q / 2.0 - disc) > std::abs(u3)) u3 = -q / 2.0 - disc;
  const cplx omega(-0.5, std::sqrt(3.0) / 2.0);
  std::array<cplx, 3> w{};
  if (std::abs(u3) == 0.0) {
    w = {0.0, 0.0, 0.0};
  } else {
    cplx u = std::pow(u3, 1.0 / 3.0);
    for (int j = 0; j < 3; ++j) {
      w[std::size_t(j)] = u - p / (3.0 * u);
      u *= omega;
    }
  }
  auto f = [&](cplx z) { return ((z + a) * z + b) * z + c; };
  auto df = [&](cplx z) { return (3.0 * z + 2.0 * a) * z + b; };
  std::array<cplx, 3> z{};
  for (int j = 0; j < 3; ++j) {
    cplx r = w[std::size_t(j)] - a / 3.0;
    for (int it = 0; it < 4; ++it) {
      const cplx d = df(r);
      if (d == 0.0) break;
      const cplx cand = r - f(r) / d;
      if (!(std::abs(f(cand)) < std::abs(f(r)))) break;
      r = cand;
    }
    z[std::size_t(j)] = r;
  }
  return z;
}

// Greedy nearest-pair multiset distance (max over matched pairs); sizes must agree.
inline double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  while (!a.empty()) {
    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        if (std::abs(a[i] - b[j]) < best) best = std::abs(a[i] - b[j]), bi = i, bj = j;
    worst = std::max(worst, best);
    a.erase(a.begin() + std::ptrdiff_t(bi));
    b.erase(b.begin() + std::ptrdiff_t(bj));
  }
  return worst;
}

template <class T>
MatXT<T> matrix_power(const MatXT<T>& W, int n) {
  if (n < 0) throw std::invalid_argument("matrix_power: negative exponent");
  MatXT<T> result = MatXT<T>::Identity(W.rows(), W.cols()), base = W;
  while (n > 0) {
    if (n & 1) result = result * base;
    base = base * base;
    n >>= 1;
  }
  return result;
}

}  // namespace dcqw
