#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace krylov {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cxd kI{0.0, 1.0};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ResourceGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Warning/flag sink carried by results that can terminate abnormally.
struct Flags {
  std::vector<std::string> warnings;
  void warn(std::string w) { warnings.push_back(std::move(w)); }
  bool has(const std::string& needle) const {
    for (const auto& w : warnings)
      if (w.find(needle) != std::string::npos) return true;
    return false;
  }
};

// splitmix64, used to derive independent per-sample seeds from (master, index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline bool approx_hermitian(const Mat& A, double rel_tol = 1e-10) {
  const double scale = std::max(1e-300, A.cwiseAbs().maxCoeff());
  return (A - A.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

inline void require_finite(const Mat& A, const char* what) {
  if (!A.allFinite()) throw DomainError(std::string(what) + ": non-finite entries");
}

}  // namespace krylov
