#include "krylov/tridiag.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "krylov/parallel.hpp"

namespace krylov {

namespace {

// Two classical Gram-Schmidt passes against the stored basis.
void full_reortho(const std::vector<Vec>& basis, const DotFn& dot, Vec& w) {
  const int nb = static_cast<int>(basis.size());
  if (nb == 0) return;
  std::vector<cxd> coef(nb);
  for (int pass = 0; pass < 2; ++pass) {
    const bool par_ok = par::openmp_enabled() && w.size() >= 8192 && nb >= 8;
#pragma omp parallel for schedule(static) if (par_ok)
    for (int k = 0; k < nb; ++k) coef[k] = dot(basis[k], w);
    for (int k = 0; k < nb; ++k) w.noalias() -= coef[k] * basis[k];
  }
}

double real_norm(const DotFn& dot, const Vec& v) {
  const double n2 = dot(v, v).real();
  return n2 > 0 ? std::sqrt(n2) : 0.0;
}

}  // namespace

double LanczosResult::gram_defect(const DotFn& dot) const {
  double worst = 0;
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = i; j < basis.size(); ++j) {
      const cxd g = dot(basis[i], basis[j]);
      const double target = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(g - target));
    }
  return worst;
}

LanczosResult lanczos_core(const ApplyFn& apply, const DotFn& dot, Vec seed,
                           const LanczosOptions& opt) {
  LanczosResult res;
  const double seed_norm = real_norm(dot, seed);
  if (seed_norm == 0) throw DomainError("lanczos: zero seed");
  if (std::abs(seed_norm - 1.0) > 1e-8) {
    res.flags.warn("seed auto-normalized");
    seed /= seed_norm;
  } else {
    seed /= seed_norm;
  }

  std::vector<Vec> basis;
  const bool keep_all = opt.reortho == Reortho::Full || opt.store_basis;
  basis.push_back(seed);

  std::vector<double> as, bs;
  Vec v = seed;
  Vec v_prev;
  double scale = 0;
  double b_prev = 0;
  bool ortho_warned = false;

  for (int n = 1; n <= opt.max_n; ++n) {
    Vec w = apply(v);
    double a = 0;
    if (opt.compute_a) {
      const cxd araw = dot(v, w);
      a = araw.real();
      if (std::abs(araw.imag()) > 1e-8 * (std::abs(a) + scale + 1e-300) &&
          std::abs(araw.imag()) > 1e-13)
        res.flags.warn("diagonal coefficient has imaginary part; generator not Hermitian "
                       "under this inner product");
      w.noalias() -= cxd(a) * v;
    }
    if (n > 1) w.noalias() -= cxd(b_prev) * v_prev;

    if (opt.reortho == Reortho::Full) full_reortho(basis, dot, w);

    const double b = real_norm(dot, w);
    scale = std::max({scale, b, std::abs(a)});
    as.push_back(a);

    const bool below = (b == 0.0) || (b <= opt.term_rel_tol * scale) ||
                       (n == 1 && b <= 1e-14 * std::abs(a));
    if (below) {
      res.terminated = true;
      res.krylov_dim = n;
      if (n == 1) res.flags.warn("seed commutes with generator (D_K = 1)");
      break;
    }
    bs.push_back(b);
    b_prev = b;
    v_prev = v;
    v = w / b;
    if (keep_all)
      basis.push_back(v);
    else if (opt.reortho == Reortho::None && !ortho_warned && n % 16 == 0) {
      const double overlap = std::abs(dot(seed, v));
      if (overlap > 1e-6) {
        res.flags.warn("orthogonality loss detected (re-orthogonalization off)");
        ortho_warned = true;
      }
    }
  }
  if (!res.terminated) res.hit_max_n = true;

  res.a = Eigen::Map<const RVec>(as.data(), as.size());
  res.b = Eigen::Map<const RVec>(bs.data(), bs.size());
  if (opt.store_basis) res.basis = std::move(basis);
  return res;
}

namespace {

struct OperatorVectorSpace {
  ApplyFn apply;
  DotFn dot;
  Vec seed;
};

OperatorVectorSpace make_operator_space(const SuperOperator& L, const Mat& seed,
                                        const InnerProduct& ip) {
  if (seed.rows() != L.dim() || seed.cols() != L.dim())
    throw DimensionError("operator lanczos: seed dimension mismatch");
  OperatorVectorSpace sp;
  if (!ip.thermal()) {
    const double d = static_cast<double>(L.dim());
    sp.apply = [&L](const Vec& v) { return L.apply_vec(v); };
    sp.dot = [d](const Vec& u, const Vec& v) { return u.dot(v) / d; };
    sp.seed = vectorize(seed);
    return sp;
  }
  if (L.kind() != SuperOperator::Kind::Liouvillian)
    throw DomainError("thermal inner products are supported for Liouvillians only");
  const int d = L.dim();
  const RVec& E = ip.eigenvalues();
  RVec gaps(Eigen::Index(d) * d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) gaps[Eigen::Index(m) * d + n] = E[m] - E[n];
  const RVec w = ip.weights();
  sp.apply = [gaps](const Vec& v) { return Vec(gaps.array() * v.array()); };
  sp.dot = [w](const Vec& u, const Vec& v) {
    cxd acc = 0;
    for (Eigen::Index i = 0; i < u.size(); ++i) acc += w[i] * std::conj(u[i]) * v[i];
    return acc;
  };
  sp.seed = vectorize(ip.to_eigenbasis(seed));
  return sp;
}

}  // namespace

LanczosResult lanczos_operator(const SuperOperator& L, const Mat& seed, const InnerProduct& ip,
                               const LanczosOptions& opt) {
  auto sp = make_operator_space(L, seed, ip);
  return lanczos_core(sp.apply, sp.dot, std::move(sp.seed), opt);
}

RVec MonicResult::b() const { return delta.cwiseSqrt(); }

MonicResult lanczos_monic(const SuperOperator& L, const Mat& seed, const InnerProduct& ip,
                          const LanczosOptions& opt) {
  auto sp = make_operator_space(L, seed, ip);
  MonicResult res;
  Vec u = sp.seed;
  const double n0 = real_norm(sp.dot, u);
  if (n0 == 0) throw DomainError("monic lanczos: zero seed");
  u /= n0;  // elements kept unit-norm; scale tracked separately

  std::vector<double> as, deltas;
  Vec u_prev;
  double log_scale = 0, log_scale_prev = 0;
  double delta_prev = 0;
  double scale = 0;
  for (int n = 1; n <= opt.max_n; ++n) {
    Vec w = sp.apply(u);
    const double a = sp.dot(u, w).real();  // (O|L O)/|O|^2 of the unit representative
    as.push_back(a);
    w.noalias() -= cxd(a) * u;
    if (n > 1) w.noalias() -= cxd(delta_prev * std::exp(log_scale_prev - log_scale)) * u_prev;
    const double r = real_norm(sp.dot, w);
    const double delta = r * r;
    scale = std::max({scale, delta, a * a});
    if (delta == 0.0 || delta <= opt.term_rel_tol * opt.term_rel_tol * scale) {
      res.terminated = true;
      res.krylov_dim = n;
      break;
    }
    deltas.push_back(delta);
    delta_prev = delta;
    u_prev = u;
    u = w / r;
    log_scale_prev = log_scale;
    log_scale += std::log(r);
  }
  res.a = Eigen::Map<const RVec>(as.data(), as.size());
  res.delta = Eigen::Map<const RVec>(deltas.data(), deltas.size());
  return res;
}

LanczosResult lanczos_matrix(const Mat& G, const Vec& seed, const LanczosOptions& opt) {
  if (G.rows() != G.cols() || G.rows() != seed.size())
    throw DimensionError("lanczos_matrix: dimension mismatch");
  ApplyFn apply = [&G](const Vec& v) { return Vec(G * v); };
  DotFn dot = [](const Vec& u, const Vec& v) { return u.dot(v); };
  return lanczos_core(apply, dot, seed, opt);
}

LanczosResult lanczos_state(const Mat& H, const Vec& psi0, const StateLanczosOptions& opt) {
  if (!approx_hermitian(H)) throw DomainError("lanczos_state: H must be Hermitian");
  if (std::abs(psi0.norm() - 1.0) > 1e-8)
    throw DomainError("lanczos_state: initial state must be normalized");
  auto res = lanczos_matrix(H, psi0, opt);
  if (res.krylov_dim == 1) res.flags.warn("initial state is an eigenstate");
  if (opt.coefficient_moduli) res.a = res.a.cwiseAbs();
  return res;
}

Mat ArnoldiResult::square(int k) const {
  const int m = static_cast<int>(h.cols());
  if (k < 0 || k > m) k = m;
  return h.topLeftCorner(k, k);
}

RVec ArnoldiResult::diag_abs() const {
  const int m = static_cast<int>(std::min(h.rows(), h.cols()));
  RVec d(m);
  for (int i = 0; i < m; ++i) d[i] = std::abs(h(i, i));
  return d;
}

ArnoldiResult arnoldi_core(const ApplyFn& apply, const DotFn& dot, Vec seed,
                           const LanczosOptions& opt) {
  ArnoldiResult res;
  const double n0 = real_norm(dot, seed);
  if (n0 == 0) throw DomainError("arnoldi: zero seed");
  if (std::abs(n0 - 1.0) > 1e-8) res.flags.warn("seed auto-normalized");
  seed /= n0;

  const int m = opt.max_n;
  res.h = Mat::Zero(m + 1, m);
  res.basis.push_back(seed);
  double scale = 0;
  for (int k = 1; k <= m; ++k) {
    Vec u = apply(res.basis[k - 1]);
    // CGS with a second correction pass
    for (int pass = 0; pass < 2; ++pass) {
      const int nb = static_cast<int>(res.basis.size());
      std::vector<cxd> coef(nb);
      const bool par_ok = par::openmp_enabled() && u.size() >= 8192 && nb >= 8;
#pragma omp parallel for schedule(static) if (par_ok)
      for (int j = 0; j < nb; ++j) coef[j] = dot(res.basis[j], u);
      for (int j = 0; j < nb; ++j) {
        u.noalias() -= coef[j] * res.basis[j];
        res.h(j, k - 1) += coef[j];
      }
    }
    const double hk = real_norm(dot, u);
    for (int j = 0; j < static_cast<int>(res.basis.size()); ++j)
      scale = std::max(scale, std::abs(res.h(j, k - 1)));
    if (hk == 0.0 || hk <= opt.term_rel_tol * scale) {
      res.terminated = true;
      res.krylov_dim = k;
      res.h.conservativeResize(k, k);
      return res;
    }
    res.h(k, k - 1) = hk;
    res.basis.push_back(u / hk);
  }
  return res;
}

ArnoldiResult arnoldi(const SuperOperator& Lo, const Mat& seed, const InnerProduct& ip,
                      const LanczosOptions& opt) {
  auto sp = make_operator_space(Lo, seed, ip);
  return arnoldi_core(sp.apply, sp.dot, std::move(sp.seed), opt);
}

RVec BiLanczosResult::d() const {
  RVec out(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) out[i] = std::sqrt(b[i] * c[i]);
  return out;
}

double BiLanczosResult::biortho_defect(const DotFn& dot) const {
  double worst = 0;
  for (size_t i = 0; i < q_basis.size(); ++i)
    for (size_t j = 0; j < p_basis.size(); ++j) {
      const cxd g = dot(q_basis[i], p_basis[j]);
      const double target = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(g - target));
    }
  return worst;
}

Mat BiLanczosResult::tridiagonal(int k) const {
  const int m = static_cast<int>(a.size());
  if (k < 0 || k > m) k = m;
  Mat T = Mat::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    T(i, i) = a[i];
    if (i + 1 < k) {
      T(i, i + 1) = b_complex[i];
      T(i + 1, i) = c[i];
    }
  }
  return T;
}

BiLanczosResult bilanczos_core(const ApplyFn& apply, const ApplyFn& apply_adj, const DotFn& dot,
                               Vec seed, const LanczosOptions& opt) {
  BiLanczosResult res;
  const double n0 = real_norm(dot, seed);
  if (n0 == 0) throw DomainError("bilanczos: zero seed");
  if (std::abs(n0 - 1.0) > 1e-8) res.flags.warn("seed auto-normalized");
  seed /= n0;

  std::vector<Vec>& P = res.p_basis;
  std::vector<Vec>& Q = res.q_basis;
  P.push_back(seed);
  Q.push_back(seed);

  std::vector<cxd> as, bs;
  std::vector<double> cs;
  double scale = 0;
  cxd b_j = 0;
  double c_j = 0;
  for (int j = 0; j < opt.max_n; ++j) {
    Vec r = apply(P[j]);
    Vec s = apply_adj(Q[j]);
    if (j > 0) {
      r.noalias() -= b_j * P[j - 1];
      s.noalias() -= std::conj(cxd(c_j)) * Q[j - 1];
    }
    const cxd a_j = dot(Q[j], r);
    as.push_back(a_j);
    r.noalias() -= a_j * P[j];
    s.noalias() -= std::conj(a_j) * Q[j];

    if (opt.reortho == Reortho::Full) {
      for (int pass = 0; pass < 2; ++pass) {
        const int nb = static_cast<int>(P.size());
        std::vector<cxd> cr(nb), cs2(nb);
        const bool par_ok = par::openmp_enabled() && r.size() >= 8192 && nb >= 8;
#pragma omp parallel for schedule(static) if (par_ok)
        for (int i = 0; i < nb; ++i) {
          cr[i] = dot(Q[i], r);
          cs2[i] = dot(P[i], s);
        }
        for (int i = 0; i < nb; ++i) {
          r.noalias() -= cr[i] * P[i];
          s.noalias() -= cs2[i] * Q[i];
        }
      }
    }

    const cxd omega = dot(r, s);
    scale = std::max({scale, std::abs(a_j), std::abs(b_j), c_j});
    const double rn = real_norm(dot, r), sn = real_norm(dot, s);
    if (std::sqrt(std::abs(omega)) <= opt.term_rel_tol * std::max(scale, 1e-300)) {
      if (rn > 1e-6 * scale && sn > 1e-6 * scale) {
        res.flags.warn("serious breakdown: omega ~ 0 with nonzero residuals");
      }
      res.terminated = true;
      res.krylov_dim = j + 1;
      break;
    }
    if (omega.real() < 0 && std::abs(omega.imag()) < 1e-12 * std::abs(omega.real()))
      res.flags.warn("omega negative real: principal branch taken, phase recorded in b");

    c_j = std::sqrt(std::abs(omega));
    b_j = std::conj(omega) / c_j;
    cs.push_back(c_j);
    bs.push_back(b_j);
    P.push_back(Vec(r / c_j));
    Q.push_back(Vec(s / std::conj(b_j)));
  }

  res.a = Eigen::Map<const Vec>(as.data(), as.size());
  res.b_complex = Eigen::Map<const Vec>(bs.data(), bs.size());
  res.c = Eigen::Map<const RVec>(cs.data(), cs.size());
  res.b.resize(res.b_complex.size());
  bool phase_flagged = false;
  for (Eigen::Index i = 0; i < res.b_complex.size(); ++i) {
    res.b[i] = std::abs(res.b_complex[i]);
    if (!phase_flagged && res.b[i] > 0 &&
        std::abs(std::arg(res.b_complex[i])) > 1e-8) {
      res.flags.warn("off-diagonal coefficients carry a phase; |b| reported");
      phase_flagged = true;
    }
  }
  if (!opt.store_basis) {
    res.p_basis.clear();
    res.q_basis.clear();
  }
  return res;
}

BiLanczosResult bilanczos(const SuperOperator& Lo, const Mat& seed, const InnerProduct& ip,
                          const LanczosOptions& opt) {
  if (ip.thermal()) throw DomainError("bilanczos: infinite-temperature inner product only");
  auto sp = make_operator_space(Lo, seed, ip);
  auto apply_adj = [&Lo](const Vec& v) { return Lo.apply_adjoint_vec(v); };
  auto res = bilanczos_core(sp.apply, apply_adj, sp.dot, std::move(sp.seed), opt);
  // traceless seeds keep the dynamics unital; flag otherwise
  if (std::abs(seed.trace()) > 1e-10 * (1.0 + seed.cwiseAbs().maxCoeff()) * seed.rows())
    res.flags.warn("seed is not traceless; trace preservation not represented in the chain");
  return res;
}

}  // namespace krylov
