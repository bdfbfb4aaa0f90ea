#pragma once

#include <cmath>
#include <numbers>

#include "types.hpp"

namespace dcqw {

// H = [[a, b], [c, d]], basis order L, R.
struct Coin {
  cplx a, b, c, d;
  bool generic = false;  // abcd != 0

  Mat2 matrix() const {
    Mat2 h;
    h << a, b, c, d;
    return h;
  }
  bool operator==(const Coin& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }
};

inline double unitarity_residual(const Mat2& h) {
  return (h.adjoint() * h - Mat2::Identity()).norm();
}

inline Coin make_coin(cplx a, cplx b, cplx c, cplx d, double tol = 1e-10) {
  Coin coin{a, b, c, d};
  double res = unitarity_residual(coin.matrix());
  if (!(res <= tol))
    throw std::invalid_argument("coin is not unitary: ||H*H - I|| = " + fmt_num(res));
  coin.generic = a != 0.0 && b != 0.0 && c != 0.0 && d != 0.0;
  return coin;
}

inline Coin make_hadamard() {
  const double h = std::numbers::sqrt2 / 2;
  return make_coin(h, h, h, -h);
}

inline bool is_hadamard(const Coin& coin, double tol = 1e-14) {
  const Coin h = make_hadamard();
  return std::abs(coin.a - h.a) < tol && std::abs(coin.b - h.b) < tol &&
         std::abs(coin.c - h.c) < tol && std::abs(coin.d - h.d) < tol;
}

// (A (x) conj B)[(i1 i2), (j1 j2)] = A[i1 j1] * conj(B[i2 j2]), order LL, LR, RL, RR.
template <class T = double>
Mat4T<T> tensor_conj(const Eigen::Matrix<std::complex<T>, 2, 2>& A,
                     const Eigen::Matrix<std::complex<T>, 2, 2>& B) {
  Mat4T<T> out;
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int j1 = 0; j1 < 2; ++j1)
        for (int j2 = 0; j2 < 2; ++j2)
          out(2 * i1 + i2, 2 * j1 + j2) = A(i1, j1) * std::conj(B(i2, j2));
  return out;
}

template <class T = double>
struct CoinBlocksT {
  using M2 = Eigen::Matrix<std::complex<T>, 2, 2>;
  M2 P, Q;    // H|L><L|, H|R><R|
  M2 Pp, Qp;  // |L><L|H, |R><R|H
  Mat4T<T> PP, QQ, PQ, QP;
};
using CoinBlocks = CoinBlocksT<double>;

template <class T = double>
CoinBlocksT<T> blocks_as(const Coin& coin) {
  using C = std::complex<T>;
  auto cv = [](cplx z) { return C(T(z.real()), T(z.imag())); };
  CoinBlocksT<T> bl;
  const C z(0);
  bl.P << cv(coin.a), z, cv(coin.c), z;
  bl.Q << z, cv(coin.b), z, cv(coin.d);
  bl.Pp << cv(coin.a), cv(coin.b), z, z;
  bl.Qp << z, z, cv(coin.c), cv(coin.d);
  bl.PP = tensor_conj<T>(bl.P, bl.P);
  bl.QQ = tensor_conj<T>(bl.Q, bl.Q);
  bl.PQ = tensor_conj<T>(bl.P, bl.Q);
  bl.QP = tensor_conj<T>(bl.Q, bl.P);
  return bl;
}

inline CoinBlocks blocks(const Coin& coin) { return blocks_as<double>(coin); }

}  // namespace dcqw
