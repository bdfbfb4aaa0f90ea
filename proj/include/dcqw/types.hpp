#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dcqw {

using cplx = std::complex<double>;

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec2 = Eigen::Vector2cd;
using Vec4 = Eigen::Vector4cd;
using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;

template <class T>
using MatXT = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using VecXT = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, 1>;
template <class T>
using Mat4T = Eigen::Matrix<std::complex<T>, 4, 4>;

// Step requested past the allocated horizon.
struct horizon_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Eigensolver failed to converge.
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace dcqw
