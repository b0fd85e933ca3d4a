#pragma once

#include <doctest.h>

#include <random>

#include "krylov/types.hpp"

namespace krylov::test {

inline Mat random_matrix(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 1);
  Mat A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = cxd(g(rng), g(rng));
  return A;
}

inline Mat random_hermitian(int d, std::uint64_t seed) {
  Mat A = random_matrix(d, seed);
  return 0.5 * (A + A.adjoint());
}

inline Mat sigma_x() {
  Mat s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}
inline Mat sigma_y() {
  Mat s(2, 2);
  s << 0, cxd(0, -1), cxd(0, 1), 0;
  return s;
}
inline Mat sigma_z() {
  Mat s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}
inline Mat sigma_minus() {
  Mat s(2, 2);
  s << 0, 0, 1, 0;  // lowers e0 -> e1 in this basis convention
  return s;
}

// row-major kron consistent with vec(A X B) = (A (x) B^T) vec X
inline Mat kron(const Mat& A, const Mat& B) {
  Mat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

inline double max_abs(const Mat& A) { return A.cwiseAbs().maxCoeff(); }

// simple least squares y ~ s x + c
inline std::pair<double, double> fit_line(const RVec& x, const RVec& y) {
  const double n = static_cast<double>(x.size());
  const double sx = x.sum(), sy = y.sum(), sxx = x.dot(x), sxy = x.dot(y);
  const double det = n * sxx - sx * sx;
  return {(n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det};
}

}  // namespace krylov::test
