#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "krylov/opspace.hpp"
#include "krylov/types.hpp"

namespace krylov {

// ---------------------------------------------------------------- SYK

struct SykSpec {
  int n_majorana = 10;   // even
  int q = 4;             // even body count
  double coupling = 1.0; // script-J energy scale; J^2 = coupling^2 2^{q-1}/q
  std::uint64_t seed = 0;
};

// Dense 2^{N/2} Hamiltonian, couplings drawn one per index tuple in
// lexicographic order from N(0, (q-1)! J^2 / N^{q-1}).
Mat syk_hamiltonian(const SykSpec& spec);

enum class SykJumpKind { Linear, PBody };

struct SykJumpParams {
  SykJumpKind kind = SykJumpKind::Linear;
  double lambda = 0.0;  // linear: L_i = sqrt(lambda) psi_i, i = 1..N
  int p = 2;            // p-body (even p only)
  double V = 0.0;
  int M = 1;            // number of random p-body jumps
  std::uint64_t seed = 0;
};

std::vector<Jump> syk_jumps(const SykSpec& spec, const SykJumpParams& params);

// ---------------------------------------------------------------- spin models

enum class BoundaryCondition { Open, Periodic };

// H = -sum sz_j sz_{j+1} - g sum sx_j - h sum sz_j on N <= 14 sites.
Mat mfim_hamiltonian(int n_sites, double g, double h, BoundaryCondition bc);

// Collective-spin Hamiltonian x + 2 z^2 with x = Sx/s, z = Sz/s, rescaled by
// 1/hbar_eff = s. Dimension 2s+1.
Mat lmg_hamiltonian(double s);
Mat lmg_seed_z(double s);  // the z observable (unnormalized)

// alpha (J_+ + J_-) in the (2j+1)-dimensional ladder basis (lowest weight first).
Mat su2_ladder_generator(double j, double alpha);

// ---------------------------------------------------------------- RMT

enum class Ensemble { GOE, GUE, GSE };

struct RmtSpec {
  Ensemble ensemble = Ensemble::GUE;
  int n = 2;
  double sigma = 1.0;  // std dev of the real diagonal entries
  std::uint64_t seed = 0;
};

// GOE/GUE: n x n. GSE: 2n x 2n with exact Kramers degeneracy.
Mat rmt_sample(const RmtSpec& spec);

// ---------------------------------------------------------------- DOS maps

// rho(E) = int_0^1 dx Theta(4b(x)^2 - (E-a(x))^2) / (pi sqrt(...)), with the
// edge singularity handled by a square-root substitution.
RVec dos_from_mean_lanczos(const std::function<double(double)>& b_of_x,
                           const std::function<double(double)>& a_of_x, const RVec& e_grid);

// Inverse for symmetric rho, a = 0, monotone non-increasing b(x): marching
// bisection matching the integrated tail of rho at each edge 2 b(x_i).
RVec mean_lanczos_from_dos(const RVec& e_grid, const RVec& rho, const RVec& x_grid,
                           int max_iter = 200);

// ---------------------------------------------------------------- oracles

struct OracleSpec {
  enum class Family { SL2R, HW, SU2, OpenExact, LargeQSyk, Cft, DissSykAutocorr };
  Family family = Family::SL2R;
  double alpha = 1.0;  // SL2R/HW/SU2 prefactor
  double eta = 1.0;    // SL2R / OpenExact
  double j = 1.0;      // SU2 spin
  double gamma = 1.0, u = 0.0;  // OpenExact
  double coupling = 1.0;        // LargeQSyk / DissSykAutocorr script-J
  double q = 4.0;               // LargeQSyk body count (enters as 2/q)
  double delta = 1.0, beta = kPi;  // Cft
  double lambda_tilde = 0.0;       // DissSykAutocorr

  static OracleSpec sl2r(double alpha, double eta);
  static OracleSpec hw(double alpha);
  static OracleSpec su2(double alpha, double j);
  static OracleSpec open_exact(double gamma, double u, double eta);
  static OracleSpec large_q_syk(double coupling, double q);
  static OracleSpec cft(double delta, double beta);
  static OracleSpec diss_syk(double coupling, double lambda_tilde, double q);
};

// Closed forms bundled per family: coefficient sequences, wavefunctions,
// complexity, norm and autocorrelation, plus exact moment tables where the
// family has one. Entries not defined for a family are left empty.
struct Oracle {
  OracleSpec spec;
  int krylov_dim = -1;  // -1: infinite chain
  std::function<double(int)> b;    // n >= 1
  std::function<cxd(int)> a;       // n >= 0
  std::function<cxd(int, double)> phi;   // (n, t)
  std::function<cxd(int, double)> dphi;  // d phi_n / dt, analytic
  std::function<double(double)> K;
  std::function<double(double)> varK;
  std::function<double(double)> Z;       // sum |phi_n|^2
  std::function<cxd(double)> autocorr;   // C(t), real time
  // Exact generator moments m_0..m_{n_max} (operator convention).
  std::function<std::vector<cxd>(int)> moments;

  // Internal-consistency report: recurrence residual of phi against (a, b)
  // and normalization defect, maximized over the given grid.
  struct Residuals {
    double recurrence = 0;
    double normalization = 0;
    double complexity = 0;
  };
  Residuals self_check(const RVec& t_grid, int n_sites) const;
};

Oracle oracle(const OracleSpec& spec);

// Tangent numbers T_1..T_m (1, 2, 16, 272, ...) as doubles.
std::vector<double> tangent_numbers(int m);

}  // namespace krylov
