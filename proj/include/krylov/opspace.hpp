#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <variant>

#include "krylov/types.hpp"

namespace krylov {

enum class NormConvention { Unnormalized, DividedBySqrtTraceIdentity };

// Row-wise vectorization: vec(A)[i*d + j] = A(i, j).
Vec vectorize(const Mat& A, NormConvention conv = NormConvention::Unnormalized);
Mat devectorize(const Vec& v, NormConvention conv = NormConvention::Unnormalized);

// Weight profile g(lambda) on [0, beta] for the general thermal inner product.
// Must be non-negative, symmetric about beta/2 and average to one.
struct GWeight {
  RVec lambda;  // increasing sample points in [0, beta]
  RVec g;
};

struct InnerProductSpec {
  enum class Kind { InfiniteTemperature, Wightman, Standard, GWeighted };
  Kind kind = Kind::InfiniteTemperature;
  double beta = 0.0;
  GWeight gw;

  static InnerProductSpec infinite_temperature() { return {}; }
  static InnerProductSpec wightman(double beta);
  static InnerProductSpec standard(double beta);
  static InnerProductSpec g_weighted(double beta, GWeight gw);
  bool thermal() const { return kind != Kind::InfiniteTemperature; }
};

// Inner product on d x d operators. Thermal kinds hold one eigendecomposition
// of H, cached at construction, and evaluate as a weighted inner product in
// the energy eigenbasis.
class InnerProduct {
 public:
  // H may be null for the infinite-temperature kind.
  InnerProduct(InnerProductSpec spec, const Mat* H = nullptr);

  cxd dot(const Mat& A, const Mat& B) const;
  double norm(const Mat& A) const;
  const InnerProductSpec& spec() const { return spec_; }

  // Thermal evaluation data: vectors expressed in the H eigenbasis carry a
  // per-entry positive weight w_{mn}; dot(u, v) = sum w conj(u) v.
  bool thermal() const { return spec_.thermal(); }
  const Mat& eigenvectors() const { return V_; }
  const RVec& eigenvalues() const { return E_; }
  const RVec& weights() const { return w_; }  // length d^2, row-major (m, n)
  Mat to_eigenbasis(const Mat& A) const { return V_.adjoint() * A * V_; }
  Mat from_eigenbasis(const Mat& A) const { return V_ * A * V_.adjoint(); }

 private:
  InnerProductSpec spec_;
  int dim_ = 0;
  Mat V_;
  RVec E_;
  RVec w_;
};

// One nonzero per column: (P x)[perm[j]] += phase[j] * x[j]. Used for
// Jordan-Wigner Majorana strings and other signed permutation operators.
struct PauliStringOp {
  Eigen::VectorXi perm;
  Vec phase;

  int dim() const { return static_cast<int>(perm.size()); }
  Mat to_dense() const;
  // Y = P * X and Y = X * P, both O(d^2).
  void apply_left(const Mat& X, Mat& out) const;
  void apply_right(const Mat& X, Mat& out) const;
  PauliStringOp adjoint() const;
  PauliStringOp scaled(cxd c) const;
  static PauliStringOp compose(const PauliStringOp& a, const PauliStringOp& b);  // a*b
  static PauliStringOp identity(int d);
};

struct Jump {
  std::variant<Mat, PauliStringOp> op;
  double rate = 1.0;

  Mat dense() const;
  int dim() const;
};

// Generator of operator dynamics, applied matrix-free by default
// (materialized d^2 x d^2 matrices only on request).
//
// Liouvillian:          L O = [H, O],   dO/dt = i L O (Heisenberg)
// AdjointLindbladian:   L O = [H, O] - i sum_k mu_k (s L_k^dag O L_k
//                              - (1/2){L_k^dag L_k, O}),   dO/dt = i L O
// with s = sign (s = -1 only for odd-parity fermionic seed and jumps).
class SuperOperator {
 public:
  enum class Kind { Liouvillian, AdjointLindbladian };

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  bool hermitian() const { return kind_ == Kind::Liouvillian; }

  Mat apply(const Mat& O) const;
  // Adjoint with respect to the Hilbert-Schmidt inner product; equals apply()
  // for a Liouvillian and gives the Schroedinger-picture generator for a
  // Lindbladian. Needed for the left bi-Lanczos recursion.
  Mat apply_adjoint(const Mat& O) const;

  Mat apply_hamiltonian_part(const Mat& O) const;
  Mat apply_dissipative_part(const Mat& O) const;

  Vec apply_vec(const Vec& v) const;
  Vec apply_adjoint_vec(const Vec& v) const;

  // (d^2) x (d^2) matrix; guarded (default cap d <= 64).
  Mat materialize(int max_dim = 64) const;

  const Mat& hamiltonian() const { return H_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  int sign() const { return sign_; }

  friend SuperOperator build_liouvillian(const Mat& H);
  friend SuperOperator build_adjoint_lindbladian(const Mat& H, std::vector<Jump> jumps,
                                                 int sign);

 private:
  int dim_ = 0;
  Kind kind_ = Kind::Liouvillian;
  int sign_ = +1;
  Mat H_;
  std::vector<Jump> jumps_;
  // Precomputed sum_k mu_k L_k^dag L_k for the anticommutator term.
  Mat ldag_l_sum_;
};

SuperOperator build_liouvillian(const Mat& H);
SuperOperator build_adjoint_lindbladian(const Mat& H, std::vector<Jump> jumps, int sign = +1);

// Jordan-Wigner Majorana operators psi_1..psi_N on N/2 qubits, normalized so
// that {psi_a, psi_b} = delta_ab (psi^2 = 1/2).
std::vector<PauliStringOp> majorana_strings(int n_majorana);

// Weight of A on Majorana strings of each size s = 0..N, under the
// infinite-temperature inner product; weights sum to |A|^2.
RVec operator_size_distribution(const Mat& A, int n_majorana);

}  // namespace krylov
