#pragma once

#include "krylov/lattice.hpp"
#include "krylov/tridiag.hpp"
#include "krylov/types.hpp"

namespace krylov {

struct SpectrumDecomp {
  RVec energies;  // ascending
  Mat vectors;    // orthonormal columns

  static SpectrumDecomp compute(const Mat& H);
  double reconstruction_error(const Mat& H) const;
  double width() const { return energies[energies.size() - 1] - energies[0]; }
  RVec boltzmann(double beta) const;  // normalized weights e^{-beta E} / Z
};

// Thermofield double in the doubled space (dimension d^2), built with the
// max-shift guard so large beta E stays in range.
Vec tfd_state(const SpectrumDecomp& spec, double beta);

// Survival amplitude Z(beta + it)/Z(beta) of the TFD under one-sided evolution.
Vec tfd_survival(const SpectrumDecomp& spec, double beta, const RVec& t_grid);

// |Z(beta+it)/Z(beta)|^2, optionally with an eigenvalue filter g(E).
RVec sff(const SpectrumDecomp& spec, double beta, const RVec& t_grid,
         const std::function<double(double)>& filter = {});

enum class TfdEvolution { OneSided, SymmetricHalf };  // H x I vs (H x I + I x H)/2

struct SpreadResult {
  LanczosResult lanczos;
  ComplexityTrace trace;
  KrylovWavefunction wavefunction;
};

// Generic state-space spread complexity: Lanczos chain + propagation.
SpreadResult spread_complexity(const Mat& H, const Vec& psi0, const RVec& t_grid,
                               int max_n = -1);

// TFD-seeded runs reduce to the coherent Gibbs state on one copy; only the
// spectrum enters. The two doubled-space evolutions give identical survival.
SpreadResult spread_tfd(const SpectrumDecomp& spec, double beta, const RVec& t_grid,
                        TfdEvolution evolution = TfdEvolution::OneSided);

struct SpectralComplexityResult {
  RVec t;
  RVec value;
  int skipped_pairs = 0;  // |E_i - E_j| below the degeneracy cut
};

SpectralComplexityResult spectral_complexity(const SpectrumDecomp& spec, double beta,
                                             const RVec& t_grid);
// Ensemble-analytic curve for GUE with semicircle support [-2, 2].
RVec gue_spectral_complexity_analytic(int n, const RVec& t_grid);

struct DensityChain {
  RVec b;
  RVec traces;      // Tr(rho_n)
  double purity0 = 0;
  int krylov_dim = -1;
  bool terminated = false;
  Flags flags;
  std::vector<Mat> elements;  // rho_n (uniformly scaled orthogonal chain)

  // identity reconstruction from the even elements
  Mat reconstruct_identity() const;
};

// Krylov chain of a density matrix under L = [H, .]; the first element stays
// the physical unit-trace rho_0 and the whole chain carries its norm, so the
// printed trace identities hold exactly.
DensityChain density_krylov(const Mat& H, const Mat& rho0, int max_n,
                            double psd_tol = 1e-10);

// Amplitudes phi_n(t) on the density chain (phi_n(0) = delta_n0) and the
// reconstructed density matrix at one time.
KrylovWavefunction density_propagate(const DensityChain& chain, const RVec& t_grid);
Mat density_reconstruct(const DensityChain& chain, const KrylovWavefunction& wf,
                        Eigen::Index t_index);

}  // namespace krylov
