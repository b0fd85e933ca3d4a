#include "krylov/lattice.hpp"

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace krylov {

ChainSpec ChainSpec::closed(RVec b) {
  ChainSpec c;
  c.kind = ChainKind::ClosedOperator;
  c.b = std::move(b);
  c.a = Vec::Zero(c.b.size() + 1);
  c.validate();
  return c;
}

ChainSpec ChainSpec::state(RVec b, RVec a) {
  ChainSpec c;
  c.kind = ChainKind::State;
  c.b = std::move(b);
  c.a = a.cast<cxd>();
  c.validate();
  return c;
}

ChainSpec ChainSpec::open(RVec b, Vec a) {
  ChainSpec c;
  c.kind = ChainKind::OpenBilanczos;
  c.b = std::move(b);
  c.a = std::move(a);
  c.validate();
  // physical Lindbladian chains carry purely imaginary a_n
  double worst = 0;
  for (Eigen::Index i = 0; i < c.a.size(); ++i)
    worst = std::max(worst, std::abs(c.a[i].real()));
  if (worst > 1e-8 * (1.0 + c.a.cwiseAbs().maxCoeff()))
    c.flags.warn("open chain has Re(a_n) above tolerance");
  return c;
}

ChainSpec ChainSpec::density(RVec b) {
  ChainSpec c;
  c.kind = ChainKind::DensityMatrix;
  c.b = std::move(b);
  c.a = Vec::Zero(c.b.size() + 1);
  c.validate();
  return c;
}

void ChainSpec::validate() const {
  if (a.size() != b.size() + 1)
    throw DimensionError("chain: need one more on-site term than hops");
  for (Eigen::Index i = 0; i < b.size(); ++i)
    if (!(b[i] > 0)) throw DomainError("chain: hop amplitudes must be positive");
}

namespace {

// phi -> psi = i^n phi maps every chain kind onto d/dt psi = i T psi with T
// symmetric tridiagonal (diag a, offdiag b); closed kinds have T real.
Mat chain_matrix(const ChainSpec& chain) {
  const int L = chain.sites();
  Mat T = Mat::Zero(L, L);
  for (int i = 0; i < L; ++i) {
    T(i, i) = chain.a[i];
    if (i + 1 < L) T(i, i + 1) = T(i + 1, i) = chain.b[i];
  }
  return T;
}

Vec i_powers(int L) {
  Vec p(L);
  static constexpr cxd table[4] = {cxd(1, 0), cxd(0, 1), cxd(-1, 0), cxd(0, -1)};
  for (int n = 0; n < L; ++n) p[n] = table[n % 4];
  return p;
}

KrylovWavefunction propagate_eig(const ChainSpec& chain, const RVec& t_grid, int sign) {
  const int L = chain.sites();
  Eigen::SelfAdjointEigenSolver<RMat> es;
  RMat T = RMat::Zero(L, L);
  for (int i = 0; i < L; ++i) {
    T(i, i) = chain.a[i].real();
    if (i + 1 < L) T(i, i + 1) = T(i + 1, i) = chain.b[i];
  }
  es.compute(T);
  const RMat& V = es.eigenvectors();
  const RVec& lam = es.eigenvalues();
  const RVec v0 = V.row(0);

  KrylovWavefunction wf;
  wf.kind = chain.kind;
  wf.t = t_grid;
  wf.amp.resize(L, t_grid.size());
  const Vec ip = i_powers(L);
  Vec phase(L);
  for (Eigen::Index j = 0; j < t_grid.size(); ++j) {
    for (int k = 0; k < L; ++k) phase[k] = std::exp(cxd(0, sign * lam[k] * t_grid[j])) * v0[k];
    Vec psi = V.cast<cxd>() * phase;
    if (chain.kind == ChainKind::State)
      wf.amp.col(j) = psi;
    else
      wf.amp.col(j) = psi.array() / ip.array();  // phi_n = i^{-n} psi_n, real
  }
  return wf;
}

KrylovWavefunction propagate_expm(const ChainSpec& chain, const RVec& t_grid, int sign,
                                  Flags reroute) {
  const int L = chain.sites();
  const Mat T = chain_matrix(chain);
  KrylovWavefunction wf;
  wf.kind = chain.kind;
  wf.flags = std::move(reroute);
  wf.t = t_grid;
  wf.amp.resize(L, t_grid.size());
  const Vec ip = i_powers(L);
  // uniform grids step with a cached propagator; otherwise exponentiate per gap
  Vec psi = Vec::Zero(L);
  psi[0] = 1;
  double dt_cached = 0;
  Mat U;
  double t_prev = 0;
  if (t_grid.size() > 0 && t_grid[0] != 0)
    throw DomainError("propagate: time grid must start at 0");
  for (Eigen::Index j = 0; j < t_grid.size(); ++j) {
    const double dt = t_grid[j] - t_prev;
    if (dt > 0) {
      if (std::abs(dt - dt_cached) > 1e-12 * std::max(1.0, dt)) {
        U = (cxd(0, sign) * dt * T).exp();
        dt_cached = dt;
      }
      psi = U * psi;
    }
    t_prev = t_grid[j];
    if (chain.kind == ChainKind::State)
      wf.amp.col(j) = psi;
    else
      wf.amp.col(j) = psi.array() / ip.array();
  }
  return wf;
}

KrylovWavefunction propagate_ode(const ChainSpec& chain, const RVec& t_grid, int sign) {
  namespace ode = boost::numeric::odeint;
  const int L = chain.sites();
  using state_type = std::vector<cxd>;
  const Vec a = chain.a;
  const RVec& b = chain.b;
  auto rhs = [&](const state_type& psi, state_type& dpsi, double) {
    for (int n = 0; n < L; ++n) {
      cxd acc = a[n] * psi[n];
      if (n > 0) acc += b[n - 1] * psi[n - 1];
      if (n + 1 < L) acc += b[n] * psi[n + 1];
      dpsi[n] = cxd(0, sign) * acc;
    }
  };
  state_type psi(L, cxd(0));
  psi[0] = 1;
  KrylovWavefunction wf;
  wf.kind = chain.kind;
  wf.t = t_grid;
  wf.amp.resize(L, t_grid.size());
  const Vec ip = i_powers(L);
  auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<state_type>>(1e-11, 1e-11);
  double t_prev = t_grid[0];
  if (t_prev != 0) throw DomainError("propagate: time grid must start at 0");
  for (Eigen::Index j = 0; j < t_grid.size(); ++j) {
    if (t_grid[j] > t_prev) {
      ode::integrate_adaptive(stepper, rhs, psi, t_prev, t_grid[j],
                              std::min(0.05, t_grid[j] - t_prev));
      t_prev = t_grid[j];
    }
    for (int n = 0; n < L; ++n)
      wf.amp(n, j) = chain.kind == ChainKind::State ? psi[n] : psi[n] / ip[n];
  }
  return wf;
}

}  // namespace

KrylovWavefunction propagate(const ChainSpec& chain, const RVec& t_grid,
                             PropagationMethod method) {
  if (t_grid.size() == 0 || t_grid[0] != 0)
    throw DomainError("propagate: time grid must start at 0");
  for (Eigen::Index j = 1; j < t_grid.size(); ++j)
    if (t_grid[j] <= t_grid[j - 1]) throw DomainError("propagate: times must increase");

  // Hermitian chains evolve with sign -1 in psi-space for states
  // (i d psi/dt = T psi) and +1 for operator/density amplitude transport.
  const bool hermitian = chain.kind != ChainKind::OpenBilanczos;
  const int sign = chain.kind == ChainKind::State ? -1 : +1;
  Flags reroute;
  if (!hermitian) {
    double worst = 0;
    for (Eigen::Index i = 0; i < chain.a.size(); ++i)
      worst = std::max(worst, std::abs(chain.a[i].real()));
    if (method == PropagationMethod::Eig) {
      reroute.warn("eig requested for a non-Hermitian chain: rerouted to expm");
      method = PropagationMethod::Expm;
    }
    if (method == PropagationMethod::Auto)
      method = chain.sites() <= 2000 ? PropagationMethod::Expm : PropagationMethod::AdaptiveOde;
  } else if (method == PropagationMethod::Auto) {
    method = PropagationMethod::Eig;
  }

  switch (method) {
    case PropagationMethod::Eig:
      return propagate_eig(chain, t_grid, sign);
    case PropagationMethod::Expm:
      return propagate_expm(chain, t_grid, sign, std::move(reroute));
    case PropagationMethod::AdaptiveOde:
      return propagate_ode(chain, t_grid, sign);
    default:
      throw DomainError("propagate: unresolved method");
  }
}

ComplexityTrace complexity_trace(const KrylovWavefunction& wf, bool normalize) {
  const Eigen::Index nt = wf.t.size();
  const int L = static_cast<int>(wf.amp.rows());
  ComplexityTrace tr;
  tr.t = wf.t;
  tr.K.resize(nt);
  tr.varK.resize(nt);
  tr.S.resize(nt);
  tr.Z.resize(nt);
  tr.kappa3.resize(nt);
  tr.kappa4.resize(nt);
  const bool open_kind = wf.kind == ChainKind::OpenBilanczos;
  for (Eigen::Index j = 0; j < nt; ++j) {
    double z = 0;
    for (int n = 0; n < L; ++n) z += std::norm(wf.amp(n, j));
    tr.Z[j] = z;
    if (open_kind && z < 1e-280) {
      tr.truncated_at = static_cast<int>(j);
      tr.flags.warn("Z below underflow floor: trace truncated");
      tr.K.conservativeResize(j);
      tr.varK.conservativeResize(j);
      tr.S.conservativeResize(j);
      tr.Z.conservativeResize(j);
      tr.kappa3.conservativeResize(j);
      tr.kappa4.conservativeResize(j);
      tr.t.conservativeResize(j);
      break;
    }
    const double norm = (open_kind && normalize) ? z : 1.0;
    double k1 = 0, s = 0;
    for (int n = 0; n < L; ++n) {
      const double p = std::norm(wf.amp(n, j)) / norm;
      k1 += n * p;
      if (p > 1e-300) s -= p * std::log(p);
    }
    double m2 = 0, m3 = 0, m4 = 0;
    for (int n = 0; n < L; ++n) {
      const double p = std::norm(wf.amp(n, j)) / norm;
      const double d = n - k1;
      m2 += p * d * d;
      m3 += p * d * d * d;
      m4 += p * d * d * d * d;
    }
    tr.K[j] = k1;
    tr.varK[j] = m2;
    tr.S[j] = s;
    tr.kappa3[j] = m3;
    tr.kappa4[j] = m4 - 3 * m2 * m2;
  }
  return tr;
}

double open_complexity_saturation(double u, double eta) {
  if (u <= 0) throw DomainError("open saturation defined for u > 0");
  return eta / (2 * u) - eta / 2;
}

ComplexityTrace open_complexity_exact(double gamma, double u, double eta, const RVec& t_grid) {
  if (!(u >= 0 && u < 1) || gamma <= 0 || eta <= 0)
    throw DomainError("open_complexity_exact: need gamma, eta > 0 and u in [0, 1)");
  ComplexityTrace tr;
  tr.t = t_grid;
  const Eigen::Index nt = t_grid.size();
  tr.K.resize(nt);
  tr.varK.resize(nt);
  tr.Z.resize(nt);
  tr.S.resize(0);
  tr.kappa3.resize(0);
  tr.kappa4.resize(0);
  for (Eigen::Index j = 0; j < nt; ++j) {
    const double th = std::tanh(gamma * t_grid[j]);
    const double den = 1 + 2 * u * th - (1 - 2 * u * u) * th * th;
    tr.K[j] = eta * (1 - u * u) * th * th / den;
    tr.varK[j] = eta * (1 - u * u) * th * th * (1 + u * th) * (1 + u * th) / (den * den);
    tr.Z[j] = std::pow(
        u * (u * std::cosh(2 * gamma * t_grid[j]) + std::sinh(2 * gamma * t_grid[j])) - u * u +
            1,
        -eta);
  }
  return tr;
}

AlgebraReport algebra_check(const ChainSpec& chain) {
  const int L = chain.sites();
  if (L > 4096) throw ResourceGuardError("algebra_check: chain longer than 4096 sites");
  const RVec& b = chain.b;
  AlgebraReport rep;
  double scale = b.size() ? b.cwiseAbs().maxCoeff() : 1.0;

  // [K, M] - L and [K, L] - M vanish identically band by band:
  // ([K,M])_{n+1,n} = ((n+1) - n) b_{n+1} etc. The errors below are the exact
  // floating-point residuals of those band identities.
  for (int n = 0; n + 1 < L; ++n) {
    const double km = (n + 1) * b[n] - n * b[n];  // coefficient of |n+1)(n|
    rep.comKM_error = std::max(rep.comKM_error, std::abs(km - b[n]));
    rep.comKL_error = std::max(rep.comKL_error, std::abs(km - b[n]));
  }
  rep.comKM_error /= scale;
  rep.comKL_error /= scale;

  // [L, M] is diagonal with entries 2 (b_{n+1}^2 - b_n^2); fit alpha n + gamma
  // over the interior (the last site reflects truncation unless the chain
  // terminates naturally with b_{D_K} = 0).
  const int n_fit = L - 1;
  if (n_fit < 2) throw DomainError("algebra_check: chain too short");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  RVec diag(n_fit);
  for (int n = 0; n < n_fit; ++n) {
    const double bn1 = b[n];
    const double bn = n > 0 ? b[n - 1] : 0.0;
    diag[n] = 2 * (bn1 * bn1 - bn * bn);
    sx += n;
    sy += diag[n];
    sxx += double(n) * n;
    sxy += double(n) * diag[n];
  }
  const double det = n_fit * sxx - sx * sx;
  rep.alpha = (n_fit * sxy - sx * sy) / det;
  rep.gamma = (sxx * sy - sx * sxy) / det;
  double resid = 0;
  for (int n = 0; n < n_fit; ++n)
    resid = std::max(resid, std::abs(diag[n] - (rep.alpha * n + rep.gamma)));
  rep.residual = resid / std::max(1e-300, scale * scale);
  rep.closes = rep.residual <= 1e-9;
  if (rep.closes) {
    for (int n = 1; n <= static_cast<int>(b.size()); ++n) {
      const double pred2 = 0.25 * rep.alpha * n * (n - 1) + 0.5 * rep.gamma * n;
      if (pred2 <= 0) continue;
      rep.bkl_error =
          std::max(rep.bkl_error, std::abs(b[n - 1] - std::sqrt(pred2)) / std::sqrt(pred2));
    }
  }
  return rep;
}

DispersionReport dispersion_bound_check(const ComplexityTrace& trace, double b1) {
  const Eigen::Index nt = trace.t.size();
  if (nt < 7) throw DomainError("dispersion_bound_check: need at least 7 time points");
  const double h = trace.t[1] - trace.t[0];
  for (Eigen::Index j = 1; j + 1 < nt; ++j)
    if (std::abs((trace.t[j + 1] - trace.t[j]) - h) > 1e-9 * h)
      throw DomainError("dispersion_bound_check: uniform grid required");
  // step criterion for the 4th-order differences
  const double kmax = trace.K.cwiseAbs().maxCoeff();
  if (2 * b1 * h > 0.5)
    throw DomainError("dispersion_bound_check: grid too coarse for differencing");

  DispersionReport rep;
  rep.ratio.resize(nt);
  rep.ratio.setZero();
  const double floor = 1e-9 * std::max(1.0, kmax) * 2 * b1;
  for (Eigen::Index j = 0; j < nt; ++j) {
    double dk;
    if (j >= 2 && j + 2 < nt) {
      dk = (-trace.K[j + 2] + 8 * trace.K[j + 1] - 8 * trace.K[j - 1] + trace.K[j - 2]) /
           (12 * h);
    } else if (j + 4 < nt && j < 2) {
      dk = (-25 * trace.K[j] + 48 * trace.K[j + 1] - 36 * trace.K[j + 2] +
            16 * trace.K[j + 3] - 3 * trace.K[j + 4]) /
           (12 * h);
    } else {
      dk = (25 * trace.K[j] - 48 * trace.K[j - 1] + 36 * trace.K[j - 2] -
            16 * trace.K[j - 3] + 3 * trace.K[j - 4]) /
           (12 * h);
    }
    const double rhs = 2 * b1 * std::sqrt(std::max(0.0, trace.varK[j]));
    rep.worst_violation = std::max(rep.worst_violation, std::abs(dk) - rhs);
    if (rhs > floor) {
      rep.ratio[j] = std::abs(dk) / rhs;
      rep.max_ratio = std::max(rep.max_ratio, rep.ratio[j]);
    }
  }
  const double tol = 1e-7 * std::max(1.0, kmax) * std::max(1.0, 2 * b1);
  rep.holds = rep.worst_violation <= tol;
  return rep;
}

CdCoefficients cd_coefficients(const RVec& b, int krylov_dim, double b0) {
  if (krylov_dim % 2 != 0)
    throw DomainError("cd_coefficients: odd Krylov dimension not implemented");
  const int d_a = krylov_dim / 2;
  if (static_cast<int>(b.size()) < 2 * d_a - 1)
    throw DomainError("cd_coefficients: need b_1..b_{D_K-1}");
  CdCoefficients out;
  out.alpha.resize(d_a);
  if (b[0] == 0) throw DomainError("cd_coefficients: zero b at an odd index");
  out.alpha[0] = -1.0 / b[0];
  for (int k = 1; k < d_a; ++k) {
    const double b_even = b[2 * k - 1];
    const double b_odd = b[2 * k];
    if (b_odd == 0) throw DomainError("cd_coefficients: zero b at an odd index");
    out.alpha[k] = -(b_even / b_odd) * out.alpha[k - 1];
  }
  out.cost = b0 * b0 * out.alpha.squaredNorm();
  return out;
}

}  // namespace krylov
