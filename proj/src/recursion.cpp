#include "krylov/recursion.hpp"

#include <cmath>

namespace krylov {

AutocorrSpec AutocorrSpec::from_taylor(std::vector<cxd> coeffs) {
  if (coeffs.empty() || std::abs(coeffs[0] - cxd(1)) > 1e-9)
    throw DomainError("autocorr: C(0) must equal 1");
  AutocorrSpec s;
  s.taylor = std::move(coeffs);
  return s;
}

AutocorrSpec AutocorrSpec::from_samples(RVec t, Vec c) {
  if (t.size() != c.size() || t.size() < 5) throw DimensionError("autocorr: bad sample arrays");
  AutocorrSpec s;
  s.sample_t = std::move(t);
  s.sample_c = std::move(c);
  return s;
}

AutocorrSpec AutocorrSpec::closed_form(series::AcParams<double> fam) {
  AutocorrSpec s;
  s.family = fam;
  return s;
}

namespace {

template <class T>
series::AcParams<T> convert_params(const series::AcParams<double>& p) {
  series::AcParams<T> q;
  q.family = p.family;
  q.alpha = T(p.alpha);
  q.eta = T(p.eta);
  q.u = T(p.u);
  q.shift = T(p.shift);
  q.pref = T(p.pref);
  q.jj = T(p.jj);
  q.gauss_sign = p.gauss_sign;
  return q;
}

}  // namespace

MomentSequence moments_from_autocorr(const AutocorrSpec& ac, int n_max, MomentKind kind) {
  MomentSequence out;
  out.kind = kind;
  const cxd i_pow[4] = {cxd(1, 0), cxd(0, 1), cxd(-1, 0), cxd(0, -1)};
  const int isign = kind == MomentKind::Operator ? 3 : 1;  // (-i) vs (+i)

  std::vector<cxd> c;
  if (ac.has_closed_form()) {
    const auto cf = series::autocorr_series<double>(*ac.family, 0.0, n_max);
    c.assign(cf.begin(), cf.end());
  } else if (!ac.taylor.empty()) {
    if (static_cast<int>(ac.taylor.size()) < n_max + 1)
      throw DomainError("moments_from_autocorr: not enough Taylor coefficients");
    c = ac.taylor;
  } else {
    // sample route: central finite differences on a uniform grid, capped at m_8
    if (n_max > 8) {
      out.flags.warn("sample route capped at m_8 (low confidence)");
      n_max = 8;
    }
    const auto& t = ac.sample_t;
    const auto& cs = ac.sample_c;
    const Eigen::Index n = t.size();
    const double h = t[1] - t[0];
    for (Eigen::Index i = 1; i + 1 < n; ++i)
      if (std::abs((t[i + 1] - t[i]) - h) > 1e-9 * std::abs(h))
        throw DomainError("moments_from_autocorr: sample grid must be uniform");
    // index of t = 0
    Eigen::Index i0 = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(t[i]) < 0.5 * h) i0 = i;
    if (std::abs(cs[i0] - cxd(1)) > 1e-6)
      throw DomainError("moments_from_autocorr: C(0) must equal 1");
    if (i0 < 4 || i0 + 4 >= n)
      throw DomainError("moments_from_autocorr: need at least 4 samples on both sides of 0");
    auto deriv = [&](int order) {
      // 9-point central stencils, O(h^8 or h^6) accuracy
      static const double d1[9] = {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0,
                                   4.0 / 5,   -1.0 / 5,   4.0 / 105, -1.0 / 280};
      static const double d2[9] = {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72,
                                   8.0 / 5,    -1.0 / 5,  8.0 / 315, -1.0 / 560};
      static const double d3[9] = {-7.0 / 240, 3.0 / 10, -169.0 / 120, 61.0 / 30, 0,
                                   -61.0 / 30, 169.0 / 120, -3.0 / 10, 7.0 / 240};
      static const double d4[9] = {7.0 / 240, -2.0 / 5, 169.0 / 60, -122.0 / 15, 91.0 / 8,
                                   -122.0 / 15, 169.0 / 60, -2.0 / 5, 7.0 / 240};
      static const double d5[9] = {1.0 / 6, -3.0 / 2, 13.0 / 3, -29.0 / 6, 0,
                                   29.0 / 6, -13.0 / 3, 3.0 / 2, -1.0 / 6};
      static const double d6[9] = {-1.0 / 4, 3.0, -13.0, 29.0, -75.0 / 2,
                                   29.0, -13.0, 3.0, -1.0 / 4};
      static const double d7[9] = {-1.0 / 2, 7.0 / 2, -7.0, 7.0, 0, -7.0, 7.0, -7.0 / 2, 1.0 / 2};
      static const double d8[9] = {1.0, -8.0, 28.0, -56.0, 70.0, -56.0, 28.0, -8.0, 1.0};
      const double* st[9] = {nullptr, d1, d2, d3, d4, d5, d6, d7, d8};
      cxd acc = 0;
      for (int k = -4; k <= 4; ++k) acc += st[order][k + 4] * cs[i0 + k];
      return acc / std::pow(h, order);
    };
    std::vector<cxd> m(n_max + 1);
    m[0] = 1;
    for (int nn = 1; nn <= n_max; ++nn) m[nn] = deriv(nn) * i_pow[(isign * nn) % 4];
    out.m = std::move(m);
    out.flags.warn("moments from numerical differentiation: low accuracy");
    return out;
  }

  if (std::abs(c[0] - cxd(1)) > 1e-9)
    throw DomainError("moments_from_autocorr: C(0) must equal 1");
  std::vector<cxd> m(n_max + 1);
  double fact = 1;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) fact *= n;
    m[n] = c[n] * fact * i_pow[(isign * n) % 4];
  }
  out.m = std::move(m);
  return out;
}

std::vector<Cx<mpreal>> moments_from_autocorr_ext(const AutocorrSpec& ac, int n_max,
                                                  MomentKind kind, unsigned digits10) {
  if (!ac.has_closed_form())
    throw DomainError("extended-precision moments require a closed-form autocorrelation");
  PrecisionGuard guard(digits10);
  const auto p = convert_params<mpreal>(*ac.family);
  const auto c = series::autocorr_series<mpreal>(p, mpreal(0), n_max);
  std::vector<Cx<mpreal>> m(n_max + 1);
  const int isign = kind == MomentKind::Operator ? 3 : 1;
  mpreal fact(1);
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) fact *= n;
    const mpreal v = c[n] * fact;
    switch ((isign * n) % 4) {
      case 0: m[n] = Cx<mpreal>(v); break;
      case 1: m[n] = Cx<mpreal>(mpreal(0), v); break;
      case 2: m[n] = Cx<mpreal>(-v); break;
      case 3: m[n] = Cx<mpreal>(mpreal(0), -v); break;
    }
  }
  return m;
}

namespace {

// Moment -> (a, b) recursion:
//   M_k^{(0)} = (-1)^k m_k, L_k^{(0)} = (-1)^{k+1} m_{k+1}
//   M_k^{(n)} = L_k^{(n-1)} - L_{n-1}^{(n-1)} M_k^{(n-1)} / M_{n-1}^{(n-1)}
//   L_k^{(n)} = M_{k+1}^{(n)} / M_n^{(n)} - M_k^{(n-1)} / M_{n-1}^{(n-1)}
//   b_n^2 = M_n^{(n)},  a_n = -L_n^{(n)}
// The pivot loses roughly a digit per step; the engine stops at the floor.
template <class C>
struct MomentRecursion {
  std::vector<C> a, b2;
  int valid_n = 0;
  bool precision_floor = false, hankel_failure = false;
  int failure_index = -1;

  template <class MagFn, class RealishFn>
  void run(const std::vector<C>& m, double eps, MagFn mag, RealishFn neg_real) {
    const int K = static_cast<int>(m.size()) - 1;
    std::vector<C> M(K + 1), L(K + 1), Mp, Lp;
    for (int k = 0; k <= K; ++k) M[k] = (k % 2 == 0) ? m[k] : -m[k];
    for (int k = 0; k < K; ++k) L[k] = (k % 2 == 0) ? -m[k + 1] : m[k + 1];
    a.push_back(-L[0]);
    double scale0 = 0;
    for (int k = 0; k <= K; ++k) scale0 = std::max(scale0, mag(M[k]));
    for (int n = 1; 2 * n <= K; ++n) {
      Mp = M;
      Lp = L;
      double scale = 0;
      for (int k = n; k <= K - n; ++k) {
        M[k] = Lp[k] - Lp[n - 1] * (Mp[k] / Mp[n - 1]);
        scale = std::max(scale, mag(M[k]));
      }
      const double pivot = mag(M[n]);
      if (neg_real(M[n])) {
        hankel_failure = true;
        failure_index = n;
        break;
      }
      if (pivot <= 1e3 * eps * std::max(scale, scale0)) {
        precision_floor = true;
        failure_index = n;
        break;
      }
      b2.push_back(M[n]);
      valid_n = n;
      for (int k = n; k <= K - n - 1; ++k) L[k] = M[k + 1] / M[n] - Mp[k] / Mp[n - 1];
      if (K - n - 1 >= n) a.push_back(-L[n]);
    }
  }

  void fill_flags(MomentToLanczosResult& r) const {
    if (hankel_failure)
      r.flags.warn("Hankel positivity failed at n = " + std::to_string(failure_index));
    if (precision_floor)
      r.flags.warn("precision floor at n = " + std::to_string(failure_index) +
                   "; extended precision required");
  }
};

}  // namespace

MomentToLanczosResult lanczos_from_moments(const std::vector<cxd>& m) {
  if (m.empty() || std::abs(m[0] - cxd(1)) > 1e-9)
    throw DomainError("lanczos_from_moments: m_0 must equal 1");
  MomentRecursion<cxd> eng;
  eng.run(
      m, 2.2e-16, [](const cxd& z) { return std::abs(z); },
      [](const cxd& z) {
        return std::abs(z.imag()) <= 1e-10 * (1.0 + std::abs(z.real())) && z.real() < 0;
      });
  MomentToLanczosResult r;
  r.valid_n = eng.valid_n;
  r.a = Eigen::Map<const Vec>(eng.a.data(), eng.a.size());
  r.b_complex.resize(eng.b2.size());
  r.b.resize(eng.b2.size());
  for (size_t i = 0; i < eng.b2.size(); ++i) {
    r.b_complex[i] = std::sqrt(eng.b2[i]);
    r.b[i] = std::abs(r.b_complex[i]);
  }
  eng.fill_flags(r);
  return r;
}

namespace {
double mag_mp(const Cx<mpreal>& z) {
  const double a2 = to_double(abs2(z));
  return a2 > 0 ? std::sqrt(a2) : 0.0;
}
}  // namespace

MomentToLanczosResult lanczos_from_moments_ext(const std::vector<Cx<mpreal>>& m,
                                               unsigned digits10) {
  PrecisionGuard guard(digits10);
  MomentRecursion<Cx<mpreal>> eng;
  eng.run(
      m, std::pow(10.0, -double(digits10)), mag_mp,
      [](const Cx<mpreal>& z) {
        const double re = to_double(z.re), im = to_double(z.im);
        return std::abs(im) <= 1e-10 * (1.0 + std::abs(re)) && re < 0;
      });
  MomentToLanczosResult r;
  r.valid_n = eng.valid_n;
  r.a.resize(eng.a.size());
  for (size_t i = 0; i < eng.a.size(); ++i) r.a[i] = to_cxd(eng.a[i]);
  r.b_complex.resize(eng.b2.size());
  r.b.resize(eng.b2.size());
  for (size_t i = 0; i < eng.b2.size(); ++i) {
    const auto s = sqrt_cx(eng.b2[i]);
    r.b_complex[i] = to_cxd(s);
    r.b[i] = std::abs(r.b_complex[i]);
  }
  eng.fill_flags(r);
  return r;
}

MomentToLanczosResult lanczos_from_moments_exact(const std::vector<BigRat>& m) {
  if (m.empty() || m[0] != 1) throw DomainError("lanczos_from_moments_exact: m_0 must be 1");
  const int K = static_cast<int>(m.size()) - 1;
  std::vector<BigRat> M(K + 1), L(K + 1), Mp, Lp;
  for (int k = 0; k <= K; ++k) M[k] = (k % 2 == 0) ? m[k] : BigRat(-m[k]);
  for (int k = 0; k < K; ++k) L[k] = (k % 2 == 0) ? BigRat(-m[k + 1]) : m[k + 1];
  MomentToLanczosResult r;
  std::vector<double> av, bv;
  av.push_back(to_double(BigRat(-L[0])));
  for (int n = 1; 2 * n <= K; ++n) {
    Mp = M;
    Lp = L;
    for (int k = n; k <= K - n; ++k) M[k] = Lp[k] - Lp[n - 1] * (Mp[k] / Mp[n - 1]);
    if (M[n] <= 0) {
      r.flags.warn("Hankel positivity failed at n = " + std::to_string(n));
      break;
    }
    bv.push_back(std::sqrt(to_double(M[n])));
    r.valid_n = n;
    for (int k = n; k <= K - n - 1; ++k) L[k] = M[k + 1] / M[n] - Mp[k] / Mp[n - 1];
    if (K - n - 1 >= n) av.push_back(to_double(BigRat(-L[n])));
  }
  r.a.resize(av.size());
  for (size_t i = 0; i < av.size(); ++i) r.a[i] = av[i];
  r.b.resize(bv.size());
  r.b_complex.resize(bv.size());
  for (size_t i = 0; i < bv.size(); ++i) {
    r.b[i] = bv[i];
    r.b_complex[i] = bv[i];
  }
  return r;
}

cxd tridiagonal_moment(const Vec& a, const RVec& b, int n, int j, int k) {
  const int len = static_cast<int>(a.size());
  if (j < 0 || j >= len || k < 0 || k >= len) throw DimensionError("tridiagonal_moment");
  if (std::abs(j - k) > n) return 0;  // fewer steps than the site distance
  Vec v = Vec::Zero(len);
  v[k] = 1;
  for (int s = 0; s < n; ++s) {
    Vec w = Vec::Zero(len);
    for (int i = 0; i < len; ++i) {
      w[i] += a[i] * v[i];
      if (i > 0 && i - 1 < static_cast<int>(b.size())) w[i] += b[i - 1] * v[i - 1];
      if (i < static_cast<int>(b.size())) w[i] += b[i] * v[i + 1];
    }
    v.swap(w);
  }
  return v[j];
}

std::vector<cxd> moments_from_lanczos(const Vec& a, const RVec& b, int n_max, int j, int k) {
  std::vector<cxd> out(n_max + 1);
  const int len = static_cast<int>(a.size());
  Vec v = Vec::Zero(len);
  v[k] = 1;
  out[0] = (j == k) ? cxd(1) : cxd(0);
  for (int n = 1; n <= n_max; ++n) {
    Vec w = Vec::Zero(len);
    for (int i = 0; i < len; ++i) {
      w[i] += a[i] * v[i];
      if (i > 0 && i - 1 < static_cast<int>(b.size())) w[i] += b[i - 1] * v[i - 1];
      if (i < static_cast<int>(b.size())) w[i] += b[i] * v[i + 1];
    }
    v.swap(w);
    out[n] = v[j];
  }
  return out;
}

namespace {
cxd motzkin_walk(const Vec& a, const RVec& b, int steps, int pos, int target) {
  if (steps == 0) return pos == target ? cxd(1) : cxd(0);
  if (std::abs(pos - target) > steps) return 0;
  const int len = static_cast<int>(a.size());
  cxd acc = a[pos] * motzkin_walk(a, b, steps - 1, pos, target);
  if (pos + 1 < len) acc += b[pos] * motzkin_walk(a, b, steps - 1, pos + 1, target);
  if (pos > 0) acc += b[pos - 1] * motzkin_walk(a, b, steps - 1, pos - 1, target);
  return acc;
}
}  // namespace

cxd motzkin_moment(const Vec& a, const RVec& b, int n, int j, int k) {
  if (n > 18) throw ResourceGuardError("motzkin_moment: exponential enumeration, n > 18");
  return motzkin_walk(a, b, n, k, j);
}

cxd greens_function_cf(const Vec& a, const RVec& b, cxd z, int depth) {
  if (depth < 1) throw DomainError("greens_function_cf: depth >= 1");
  if (depth > static_cast<int>(a.size()))
    throw DomainError("greens_function_cf: depth exceeds available coefficients");
  cxd f = 0;
  for (int k = depth - 1; k >= 1; --k) {
    const cxd den = z - a[k] - f;
    if (std::abs(den) < 1e-300)
      throw NumericalBreakdown("continued fraction underflow at level " + std::to_string(k));
    f = (b[k - 1] * b[k - 1]) / den;
  }
  const cxd den = z - a[0] - f;
  if (std::abs(den) < 1e-300)
    throw NumericalBreakdown("continued fraction underflow at level 0");
  return 1.0 / den;
}

// ------------------------------------------------------------------ Toda

namespace {

// order-2 truncated Taylor polynomial in (tau - tau0)
struct Jet {
  mpreal c0, c1, c2;
  Jet() : c0(0), c1(0), c2(0) {}
  explicit Jet(mpreal v) : c0(std::move(v)), c1(0), c2(0) {}
  Jet(mpreal a, mpreal b, mpreal c) : c0(std::move(a)), c1(std::move(b)), c2(std::move(c)) {}
  Jet operator+(const Jet& o) const { return {c0 + o.c0, c1 + o.c1, c2 + o.c2}; }
  Jet operator-(const Jet& o) const { return {c0 - o.c0, c1 - o.c1, c2 - o.c2}; }
  Jet operator*(const Jet& o) const {
    return {c0 * o.c0, c0 * o.c1 + c1 * o.c0, c0 * o.c2 + c1 * o.c1 + c2 * o.c0};
  }
  Jet operator/(const Jet& o) const {
    // q = this / o solved order by order
    const mpreal q0 = c0 / o.c0;
    const mpreal q1 = (c1 - q0 * o.c1) / o.c0;
    const mpreal q2 = (c2 - q0 * o.c2 - q1 * o.c1) / o.c0;
    return {q0, q1, q2};
  }
};

Jet jet_det(std::vector<std::vector<Jet>> M) {
  const int n = static_cast<int>(M.size());
  Jet det(mpreal(1));
  int sign = 1;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    mpreal best = abs(M[col][col].c0);
    for (int r = col + 1; r < n; ++r) {
      const mpreal v = abs(M[r][col].c0);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0) return Jet(mpreal(0));
    if (piv != col) {
      std::swap(M[piv], M[col]);
      sign = -sign;
    }
    det = det * M[col][col];
    for (int r = col + 1; r < n; ++r) {
      const Jet f = M[r][col] / M[col][col];
      for (int c2 = col; c2 < n; ++c2) M[r][c2] = M[r][c2] - f * M[col][c2];
    }
  }
  if (sign < 0) det = Jet(mpreal(0)) - det;
  return det;
}

}  // namespace

TodaResult toda_lanczos(const AutocorrSpec& ac, int n_max, double tau0, unsigned digits10) {
  PrecisionGuard guard(digits10);
  const int n_deriv = 2 * n_max + 2;
  std::vector<mpreal> deriv(n_deriv + 1);  // C^(k)(tau0)
  if (ac.has_closed_form()) {
    const auto p = convert_params<mpreal>(*ac.family);
    const auto c = series::autocorr_series<mpreal>(p, mpreal(tau0), n_deriv);
    mpreal fact(1);
    for (int k = 0; k <= n_deriv; ++k) {
      if (k > 0) fact *= k;
      deriv[k] = c[k] * fact;
    }
  } else if (!ac.taylor.empty()) {
    if (tau0 != 0.0)
      throw DomainError("toda_lanczos: Taylor route requires tau0 = 0");
    if (static_cast<int>(ac.taylor.size()) < n_deriv + 1)
      throw DomainError("toda_lanczos: need 2 n_max + 3 Taylor coefficients");
    mpreal fact(1);
    for (int k = 0; k <= n_deriv; ++k) {
      if (k > 0) fact *= k;
      if (std::abs(ac.taylor[k].imag()) > 1e-12 * (1 + std::abs(ac.taylor[k].real())))
        throw DomainError("toda_lanczos: Euclidean autocorrelation must be real");
      deriv[k] = mpreal(ac.taylor[k].real()) * fact;
    }
  } else {
    throw DomainError("toda_lanczos: closed-form or Taylor route required");
  }

  TodaResult res;
  // tau_n for n = -1..n_max as jets
  std::vector<Jet> taus(n_max + 2);
  taus[0] = Jet(mpreal(1));  // tau_{-1}
  for (int n = 0; n <= n_max; ++n) {
    const int dim = n + 1;
    std::vector<std::vector<Jet>> M(dim, std::vector<Jet>(dim));
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k) {
        const int o = j + k;
        M[j][k] = Jet(deriv[o], deriv[o + 1], deriv[o + 2] / 2);
      }
    taus[n + 1] = jet_det(std::move(M));
  }

  // underflow check and outputs
  std::vector<cxd> av;
  std::vector<double> bv;
  double hirota = 0;
  // Determinants shrink superexponentially; stop once the dynamic range eats
  // into the working precision.
  const mpreal floor10 = pow(mpreal(10), -(static_cast<int>(digits10) - 8));
  mpreal scale(0);
  for (int n = 0; n <= n_max; ++n) scale = std::max(scale, mpreal(abs(taus[n + 1].c0)));
  for (int n = 0; n <= n_max; ++n) {
    const Jet& tn = taus[n + 1];
    if (abs(tn.c0) <= scale * floor10 * floor10 || abs(tn.c0) == 0) {
      res.flags.warn("Hankel determinant underflow at n = " + std::to_string(n) +
                     "; extended precision required");
      break;
    }
    // a_n = d/dtau log(tau_n / tau_{n-1})
    const Jet& tp = taus[n];
    const mpreal an = tn.c1 / tn.c0 - (n == 0 ? mpreal(0) : tp.c1 / tp.c0);
    av.push_back(cxd(to_double(an), 0.0));
    if (n + 1 <= n_max) {
      const mpreal b2 = (taus[n + 2].c0 * taus[n].c0) / (tn.c0 * tn.c0);
      if (to_double(b2) < 0) {
        res.flags.warn("negative b^2 at n = " + std::to_string(n + 1));
        break;
      }
      bv.push_back(std::sqrt(to_double(b2)));
    }
    if (n >= 0 && n + 1 <= n_max) {
      // Hirota residual: tau tau'' - tau'^2 - tau_+ tau_-
      const mpreal resn =
          tn.c0 * (2 * tn.c2) - tn.c1 * tn.c1 - taus[n + 2].c0 * taus[n].c0;
      hirota = std::max(hirota, std::abs(to_double(resn / (tn.c0 * tn.c0))));
    }
  }
  res.a.resize(av.size());
  for (size_t i = 0; i < av.size(); ++i) res.a[i] = av[i];
  res.b = Eigen::Map<const RVec>(bv.data(), bv.size());
  res.hirota_residual = hirota;
  return res;
}

SpectralFunctionResult spectral_function(const RVec& t, const Vec& c, const RVec& omega) {
  if (t.size() != c.size() || t.size() < 8) throw DimensionError("spectral_function");
  const Eigen::Index n = t.size();
  const double h = t[1] - t[0];
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    if (std::abs((t[i + 1] - t[i]) - h) > 1e-9 * std::abs(h))
      throw DomainError("spectral_function: uniform grid required");
  SpectralFunctionResult out;
  out.omega = omega;
  const double cmax = c.cwiseAbs().maxCoeff();
  const double tail = std::max(std::abs(c[0]), std::abs(c[n - 1]));
  Vec cw = c;
  if (tail > 1e-6 * cmax) {
    out.windowed = true;
    out.flags.warn("tail criterion failed: Hann window applied (non-quantitative)");
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = double(i) / double(n - 1);
      cw[i] *= 0.5 * (1 - std::cos(2 * kPi * x));
    }
  }
  const double omega_max = omega.cwiseAbs().maxCoeff();
  if (omega_max * h > 0.8 * kPi)
    out.flags.warn("aliasing check failed: omega_max too close to the Nyquist limit");
  out.phi.resize(omega.size());
  for (Eigen::Index k = 0; k < omega.size(); ++k) {
    cxd acc = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      acc += w * std::exp(cxd(0, -omega[k] * t[i])) * cw[i];
    }
    out.phi[k] = acc * h;
  }
  return out;
}

std::vector<BigInt> bell_numbers(int n) {
  // Bell triangle
  std::vector<BigInt> row{1}, prev;
  std::vector<BigInt> bell{1};
  for (int i = 1; i <= n; ++i) {
    prev = row;
    row.assign(i + 1, 0);
    row[0] = prev.back();
    for (int j = 1; j <= i; ++j) row[j] = row[j - 1] + prev[j - 1];
    bell.push_back(row[0]);
  }
  return bell;
}

std::vector<BigRat> mock_autocorr_moments(int n_max) {
  const auto B = bell_numbers(n_max);
  std::vector<BigRat> m(n_max + 1, BigRat(0));
  for (int k = 0; k <= n_max; k += 2) m[k] = BigRat(B[k]);
  return m;
}

}  // namespace krylov
