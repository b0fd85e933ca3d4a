#pragma once

#include <functional>

#include "krylov/opspace.hpp"
#include "krylov/types.hpp"

namespace krylov {

enum class Reortho { None, Full };

struct LanczosOptions {
  int max_n = 100;             // number of b coefficients attempted
  Reortho reortho = Reortho::Full;
  bool store_basis = false;
  double term_rel_tol = 1e-10;  // b_n < tol * max previous b declares D_K
  bool compute_a = true;
};

struct LanczosResult {
  RVec a;  // a_0 .. a_{m}   (diagonal; zero when suppressed)
  RVec b;  // b_1 .. b_{m}
  int krylov_dim = -1;         // D_K when terminated, else -1
  bool terminated = false;     // next norm fell below tolerance
  bool hit_max_n = false;
  Flags flags;
  std::vector<Vec> basis;      // orthonormal vectors when stored

  int coeff_count() const { return static_cast<int>(b.size()); }
  double gram_defect(const std::function<cxd(const Vec&, const Vec&)>& dot) const;
};

using ApplyFn = std::function<Vec(const Vec&)>;
using DotFn = std::function<cxd(const Vec&, const Vec&)>;

// Three-term recursion with optional full re-orthogonalization against all
// stored vectors (two classical Gram-Schmidt passes per step).
LanczosResult lanczos_core(const ApplyFn& apply, const DotFn& dot, Vec seed,
                           const LanczosOptions& opt);

// Operator Lanczos: generator L on the d^2-dimensional operator space under
// the given inner product. Thermal inner products require a Liouvillian and
// evaluate in the cached H eigenbasis where the generator is diagonal.
LanczosResult lanczos_operator(const SuperOperator& L, const Mat& seed,
                               const InnerProduct& ip, const LanczosOptions& opt);

struct MonicResult {
  RVec a;      // a_0 ..
  RVec delta;  // Delta_1 ..  (Delta_n = b_n^2)
  int krylov_dim = -1;
  bool terminated = false;
  Flags flags;
  RVec b() const;  // sqrt(Delta)
};

// Monic variant: orthogonal but unnormalized elements, Delta_n tracked as the
// squared norm ratio. Elements carry an explicit log-scale to avoid overflow.
MonicResult lanczos_monic(const SuperOperator& L, const Mat& seed, const InnerProduct& ip,
                          const LanczosOptions& opt);

// State-space Lanczos for a Hermitian matrix H acting on vectors.
struct StateLanczosOptions : LanczosOptions {
  bool coefficient_moduli = false;  // fixed-seed Hessenberg-style mode
};
LanczosResult lanczos_state(const Mat& H, const Vec& psi0, const StateLanczosOptions& opt);

// Generic vector-space Lanczos under an arbitrary dot (used by both of the
// above and directly for matrix generators such as ladder-built Liouvillians).
LanczosResult lanczos_matrix(const Mat& G, const Vec& seed, const LanczosOptions& opt);

struct ArnoldiResult {
  Mat h;  // (m+1) x m upper Hessenberg block actually computed
  std::vector<Vec> basis;
  int krylov_dim = -1;
  bool terminated = false;
  Flags flags;

  Mat square(int k = -1) const;  // leading k x k block
  RVec diag_abs() const;
};

ArnoldiResult arnoldi(const SuperOperator& Lo, const Mat& seed, const InnerProduct& ip,
                      const LanczosOptions& opt);
ArnoldiResult arnoldi_core(const ApplyFn& apply, const DotFn& dot, Vec seed,
                           const LanczosOptions& opt);

struct BiLanczosResult {
  Vec a;   // complex diagonal a_0 ..
  RVec b;  // b_1 .. (phase pushed here; real part reported, see b_complex)
  RVec c;  // c_1 .. >= 0
  Vec b_complex;
  std::vector<Vec> p_basis, q_basis;
  int krylov_dim = -1;
  bool terminated = false;
  Flags flags;

  RVec d() const;  // sqrt(b_n c_n)
  double biortho_defect(const DotFn& dot) const;
  Mat tridiagonal(int k = -1) const;
};

BiLanczosResult bilanczos(const SuperOperator& Lo, const Mat& seed, const InnerProduct& ip,
                          const LanczosOptions& opt);
BiLanczosResult bilanczos_core(const ApplyFn& apply, const ApplyFn& apply_adj, const DotFn& dot,
                               Vec seed, const LanczosOptions& opt);

}  // namespace krylov
