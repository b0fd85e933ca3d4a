#pragma once

#include "krylov/types.hpp"

namespace krylov {

enum class ChainKind { ClosedOperator, State, OpenBilanczos, DensityMatrix };
enum class PropagationMethod { Auto, Eig, Expm, AdaptiveOde };

// Krylov chain data: hop amplitudes b_1..b_{L-1} and on-site terms a_0..a_{L-1}
// (zero for closed Hermitian-seed runs, purely imaginary for the physical
// open chains).
struct ChainSpec {
  ChainKind kind = ChainKind::ClosedOperator;
  RVec b;
  Vec a;
  Flags flags;

  static ChainSpec closed(RVec b);
  static ChainSpec state(RVec b, RVec a);
  static ChainSpec open(RVec b, Vec a);
  static ChainSpec density(RVec b);
  int sites() const { return static_cast<int>(b.size()) + 1; }
  void validate() const;
};

struct KrylovWavefunction {
  ChainKind kind = ChainKind::ClosedOperator;
  RVec t;
  Mat amp;  // amp(n, j) = phi_n(t_j)
  Flags flags;
};

KrylovWavefunction propagate(const ChainSpec& chain, const RVec& t_grid,
                             PropagationMethod method = PropagationMethod::Auto);

struct ComplexityTrace {
  RVec t;
  RVec K, varK, S, Z;
  RVec kappa3, kappa4;
  Flags flags;
  int truncated_at = -1;  // index where Z fell below the underflow floor
};

ComplexityTrace complexity_trace(const KrylovWavefunction& wf, bool normalize = true);

// Closed forms for the exactly solvable open chain with
// b_n^2 = g^2 (1-u^2) n (n-1+eta), a_n = i u g (2n+eta).
ComplexityTrace open_complexity_exact(double gamma, double u, double eta, const RVec& t_grid);
double open_complexity_saturation(double u, double eta);  // eta/(2u) - eta/2

struct AlgebraReport {
  double comKM_error = 0;  // max |[K,M] - L| relative to scale
  double comKL_error = 0;  // max |[K,L] - M|
  double alpha = 0, gamma = 0;  // least-squares fit of [L,M] = alpha K + gamma I
  double residual = 0;          // fit residual (relative, interior sites)
  bool closes = false;
  double bkl_error = 0;  // max rel deviation of b_n from the closed-algebra form
};

AlgebraReport algebra_check(const ChainSpec& chain);

struct DispersionReport {
  bool holds = true;
  RVec ratio;          // |dK/dt| / (2 b_1 dK), where defined
  double max_ratio = 0;
  double worst_violation = 0;  // max(|dK/dt| - 2 b1 dK), positive = violated
  Flags flags;
};

DispersionReport dispersion_bound_check(const ComplexityTrace& trace, double b1);

struct CdCoefficients {
  RVec alpha;   // alpha_1..alpha_{D_K/2}
  double cost;  // b0^2 sum alpha_k^2
};

// alpha_1 = -1/b_1, alpha_{k+1} = -(b_{2k}/b_{2k+1}) alpha_k; even D_K only.
CdCoefficients cd_coefficients(const RVec& b, int krylov_dim, double b0 = 1.0);

}  // namespace krylov
