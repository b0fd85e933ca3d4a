#include "krylov/models.hpp"

#include <cmath>
#include <numeric>

#include "krylov/series.hpp"

namespace krylov {

namespace {

// next k-subset of {0..n-1} in lexicographic order; returns false when done
bool next_subset(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

}  // namespace

Mat syk_hamiltonian(const SykSpec& spec) {
  const int N = spec.n_majorana;
  const int q = spec.q;
  if (N % 2 != 0 || N <= 0) throw DomainError("syk: N must be positive even");
  if (q % 2 != 0 || q < 2 || q > N) throw DomainError("syk: q must be even, 2 <= q <= N");
  if (N > 26) throw ResourceGuardError("syk: N > 26 exceeds the dense guard");

  const int d = 1 << (N / 2);
  const auto majo = majorana_strings(N);

  // <J^2> = (q-1)! J^2 / N^{q-1},  J^2 = 2^{q-1} scriptJ^2 / q
  double log_var = std::lgamma(q) + (q - 1) * std::log(2.0) +
                   2.0 * std::log(spec.coupling) - std::log(double(q)) -
                   (q - 1) * std::log(double(N));
  const double sigma = std::exp(0.5 * log_var);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, sigma);

  static constexpr cxd i_pow[4] = {cxd(1, 0), cxd(0, 1), cxd(-1, 0), cxd(0, -1)};
  const cxd phase_front = i_pow[(q / 2) % 4];
  Mat H = Mat::Zero(d, d);
  std::vector<int> idx(q);
  std::iota(idx.begin(), idx.end(), 0);
  do {
    const double coupling = gauss(rng);
    PauliStringOp P = majo[idx[0]];
    for (int a = 1; a < q; ++a) P = PauliStringOp::compose(P, majo[idx[a]]);
    const cxd c = phase_front * coupling;
    for (int col = 0; col < d; ++col) H(P.perm[col], col) += c * P.phase[col];
  } while (next_subset(idx, N));

  return H;
}

std::vector<Jump> syk_jumps(const SykSpec& spec, const SykJumpParams& params) {
  const int N = spec.n_majorana;
  const auto majo = majorana_strings(N);
  std::vector<Jump> jumps;
  if (params.kind == SykJumpKind::Linear) {
    if (params.lambda < 0) throw DomainError("syk_jumps: lambda >= 0 required");
    if (params.lambda == 0) return jumps;
    for (int i = 0; i < N; ++i) jumps.push_back(Jump{majo[i], params.lambda});
    return jumps;
  }
  // p-body random strings
  const int p = params.p;
  if (p % 2 != 0) throw DomainError("syk_jumps: odd p is out of scope");
  if (p <= 0 || p > N) throw DomainError("syk_jumps: invalid p");
  if (params.V < 0) throw DomainError("syk_jumps: V >= 0 required");
  const int d = 1 << (N / 2);
  const double var = std::exp(std::lgamma(p + 1) - p * std::log(double(N))) * params.V * params.V;
  const double comp_sigma = std::sqrt(var / 2.0);
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> gauss(0.0, comp_sigma);
  for (int a = 0; a < params.M; ++a) {
    Mat L = Mat::Zero(d, d);
    std::vector<int> idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    do {
      const cxd v(gauss(rng), gauss(rng));
      PauliStringOp P = majo[idx[0]];
      for (int b = 1; b < p; ++b) P = PauliStringOp::compose(P, majo[idx[b]]);
      for (int col = 0; col < d; ++col) L(P.perm[col], col) += v * P.phase[col];
    } while (next_subset(idx, N));
    jumps.push_back(Jump{std::move(L), 1.0});
  }
  return jumps;
}

Mat mfim_hamiltonian(int n_sites, double g, double h, BoundaryCondition bc) {
  if (n_sites < 2) throw DomainError("mfim: need at least 2 sites");
  if (n_sites > 14) throw ResourceGuardError("mfim: N > 14 exceeds the dense guard");
  const int d = 1 << n_sites;
  Mat H = Mat::Zero(d, d);
  const int n_bonds = bc == BoundaryCondition::Periodic ? n_sites : n_sites - 1;
  auto z = [](int state, int site) { return ((state >> site) & 1) ? -1.0 : 1.0; };
  for (int b = 0; b < d; ++b) {
    double diag = 0;
    for (int j = 0; j < n_bonds; ++j) diag -= z(b, j) * z(b, (j + 1) % n_sites);
    for (int j = 0; j < n_sites; ++j) diag -= h * z(b, j);
    H(b, b) = diag;
    for (int j = 0; j < n_sites; ++j) H(b ^ (1 << j), b) -= g;
  }
  return H;
}

namespace {

Mat spin_plus(double s) {
  const int n = static_cast<int>(std::lround(2 * s)) + 1;
  Mat sp = Mat::Zero(n, n);
  // index 0 -> m = s, index n-1 -> m = -s
  for (int i = 1; i < n; ++i) {
    const double m = s - i;
    sp(i - 1, i) = std::sqrt(s * (s + 1) - m * (m + 1));
  }
  return sp;
}

}  // namespace

Mat lmg_hamiltonian(double s) {
  if (s <= 0 || std::abs(2 * s - std::lround(2 * s)) > 1e-12)
    throw DomainError("lmg: s must be a positive half-integer");
  const int n = static_cast<int>(std::lround(2 * s)) + 1;
  const Mat sp = spin_plus(s);
  const Mat sx = 0.5 * (sp + sp.adjoint());
  Mat sz = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) sz(i, i) = s - i;
  // (x + 2 z^2) / hbar_eff with x = Sx/s, z = Sz/s, hbar_eff = 1/s
  return sx + 2.0 * sz * sz / s;
}

Mat lmg_seed_z(double s) {
  const int n = static_cast<int>(std::lround(2 * s)) + 1;
  Mat z = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) z(i, i) = (s - i) / s;
  return z;
}

Mat su2_ladder_generator(double j, double alpha) {
  if (j <= 0 || std::abs(2 * j - std::lround(2 * j)) > 1e-12)
    throw DomainError("su2: j must be a positive half-integer");
  const int n = static_cast<int>(std::lround(2 * j)) + 1;
  Mat G = Mat::Zero(n, n);
  for (int m = 0; m + 1 < n; ++m) {
    // J+ |j,-j+m> = sqrt((m+1)(2j-m)) |j,-j+m+1>
    const double v = alpha * std::sqrt((m + 1.0) * (2 * j - m));
    G(m + 1, m) = v;
    G(m, m + 1) = v;
  }
  return G;
}

Mat rmt_sample(const RmtSpec& spec) {
  if (spec.sigma <= 0) throw DomainError("rmt: sigma > 0 required");
  if (spec.n < 2) throw DomainError("rmt: n >= 2 required");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> diag(0.0, spec.sigma);
  std::normal_distribution<double> off(0.0, spec.sigma / std::sqrt(2.0));
  const int n = spec.n;
  switch (spec.ensemble) {
    case Ensemble::GOE: {
      Mat H = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        H(i, i) = diag(rng);
        for (int j = i + 1; j < n; ++j) H(i, j) = H(j, i) = off(rng);
      }
      return H;
    }
    case Ensemble::GUE: {
      Mat H = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        H(i, i) = diag(rng);
        for (int j = i + 1; j < n; ++j) {
          const cxd v(off(rng), off(rng));
          H(i, j) = v;
          H(j, i) = std::conj(v);
        }
      }
      return H;
    }
    case Ensemble::GSE: {
      // quaternion entries e0 + i e1 + j e2 + k e3 mapped to 2x2 blocks
      Mat H = Mat::Zero(2 * n, 2 * n);
      for (int i = 0; i < n; ++i) {
        const double a = diag(rng);
        H(2 * i, 2 * i) = a;
        H(2 * i + 1, 2 * i + 1) = a;
        for (int j = i + 1; j < n; ++j) {
          const double e0 = off(rng), e1 = off(rng), e2 = off(rng), e3 = off(rng);
          const cxd z1(e0, e1), z2(e2, e3);
          H(2 * i, 2 * j) = z1;
          H(2 * i, 2 * j + 1) = z2;
          H(2 * i + 1, 2 * j) = -std::conj(z2);
          H(2 * i + 1, 2 * j + 1) = std::conj(z1);
          H(2 * j, 2 * i) = std::conj(z1);
          H(2 * j + 1, 2 * i) = std::conj(z2);
          H(2 * j, 2 * i + 1) = -z2;
          H(2 * j + 1, 2 * i + 1) = z1;
        }
      }
      return H;
    }
  }
  throw std::logic_error("rmt_sample: unknown ensemble");
}

RVec dos_from_mean_lanczos(const std::function<double(double)>& b_of_x,
                           const std::function<double(double)>& a_of_x, const RVec& e_grid) {
  // Locate support boundaries of f(x) = 4b^2 - (E-a)^2 by scan + bisection,
  // then integrate each positive interval with a sin^2 substitution that
  // removes the inverse-square-root edge singularities.
  const int scan = 4000;
  const int quad = 160;
  RVec rho = RVec::Zero(e_grid.size());
  std::vector<double> gl_x(quad), gl_w(quad);
  for (int i = 0; i < quad; ++i) {
    // midpoint rule in theta on [0, pi/2] is spectrally adequate here
    gl_x[i] = (i + 0.5) * (kPi / 2) / quad;
    gl_w[i] = (kPi / 2) / quad;
  }
  for (Eigen::Index ei = 0; ei < e_grid.size(); ++ei) {
    const double E = e_grid[ei];
    auto f = [&](double x) {
      const double b = b_of_x(x);
      const double d = E - a_of_x(x);
      return 4 * b * b - d * d;
    };
    // collect sign-change boundaries
    std::vector<double> pts;
    double xp = 0.0, fp = f(0.0);
    if (fp > 0) pts.push_back(0.0);
    for (int k = 1; k <= scan; ++k) {
      const double x = double(k) / scan;
      const double fx = f(x);
      if ((fp > 0) != (fx > 0)) {
        double lo = xp, hi = x;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          ((f(mid) > 0) == (fp > 0) ? lo : hi) = mid;
        }
        pts.push_back(0.5 * (lo + hi));
      }
      xp = x;
      fp = fx;
    }
    if (fp > 0) pts.push_back(1.0);
    double acc = 0;
    for (size_t k = 0; k + 1 < pts.size(); k += 2) {
      const double xl = pts[k], xr = pts[k + 1];
      // x = xl + (xr-xl) sin^2(theta)
      for (int i = 0; i < quad; ++i) {
        const double th = gl_x[i];
        const double sn = std::sin(th), cn = std::cos(th);
        const double x = xl + (xr - xl) * sn * sn;
        const double val = f(x);
        if (val <= 0) continue;
        acc += gl_w[i] * (xr - xl) * 2 * sn * cn / (kPi * std::sqrt(val));
      }
    }
    rho[ei] = acc;
  }
  return rho;
}

RVec mean_lanczos_from_dos(const RVec& e_grid, const RVec& rho, const RVec& x_grid,
                           int max_iter) {
  const Eigen::Index ne = e_grid.size();
  if (rho.size() != ne || ne < 4) throw DimensionError("mean_lanczos_from_dos: bad grids");
  // support edge from the integrated tail
  double total = 0;
  for (Eigen::Index i = 0; i + 1 < ne; ++i)
    total += 0.5 * (rho[i] + rho[i + 1]) * (e_grid[i + 1] - e_grid[i]);
  double emax = std::abs(e_grid[ne - 1]);
  {
    double tail = 0;
    for (Eigen::Index i = ne - 1; i > 0; --i) {
      tail += 0.5 * (rho[i] + rho[i - 1]) * (e_grid[i] - e_grid[i - 1]);
      if (tail > 1e-6 * total) {
        emax = std::abs(e_grid[i]);
        break;
      }
    }
  }
  auto rho_at = [&](double E) {
    const double a = std::abs(E);
    if (a >= e_grid[ne - 1]) return 0.0;
    // symmetric input assumed; interpolate on |E|
    Eigen::Index lo = 0, hi = ne - 1;
    while (hi - lo > 1) {
      const Eigen::Index mid = (lo + hi) / 2;
      (e_grid[mid] <= a ? lo : hi) = mid;
    }
    const double w = (a - e_grid[lo]) / (e_grid[hi] - e_grid[lo]);
    return (1 - w) * rho[lo] + w * rho[hi];
  };

  const Eigen::Index nx = x_grid.size();
  RVec b(nx);
  std::vector<double> xs, bs;
  xs.push_back(0.0);
  bs.push_back(emax / 2);
  auto forward_rho = [&](double E, double x_cand, double b_cand) {
    // density at E from the piecewise-linear profile on [0, x_cand]
    auto b_of_x = [&](double x) {
      if (x <= xs.front()) return bs.front();
      if (x >= x_cand) return b_cand;
      size_t k = 0;
      while (k + 1 < xs.size() && xs[k + 1] < x) ++k;
      double x0 = xs[k], b0 = bs[k];
      double x1 = (k + 1 < xs.size()) ? xs[k + 1] : x_cand;
      double b1 = (k + 1 < xs.size()) ? bs[k + 1] : b_cand;
      if (x > xs.back()) {
        x0 = xs.back();
        b0 = bs.back();
        x1 = x_cand;
        b1 = b_cand;
      }
      const double w = (x - x0) / std::max(1e-300, x1 - x0);
      return (1 - w) * b0 + w * b1;
    };
    const int quad = 200;
    double acc = 0;
    // support ends where 2 b(x) = E; profile monotone, bisect for x*
    double lo = 0, hi = x_cand;
    if (2 * b_of_x(x_cand) > E) {
      lo = x_cand;
    } else {
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (2 * b_of_x(mid) > E ? lo : hi) = mid;
      }
    }
    const double xstar = lo;
    for (int i = 0; i < quad; ++i) {
      const double th = (i + 0.5) * (kPi / 2) / quad;
      const double sn = std::sin(th), cn = std::cos(th);
      const double x = xstar * sn * sn;
      const double bb = b_of_x(x);
      const double val = 4 * bb * bb - E * E;
      if (val <= 0) continue;
      acc += (kPi / 2) / quad * xstar * 2 * sn * cn / (kPi * std::sqrt(val));
    }
    return acc;
  };

  for (Eigen::Index i = 0; i < nx; ++i) {
    const double x = x_grid[i];
    if (x <= 0) {
      b[i] = bs.front();
      continue;
    }
    double lo = 0, hi = bs.back();
    for (int it = 0; it < max_iter; ++it) {
      const double cand = 0.5 * (lo + hi);
      const double emid = bs.back() + cand;  // midpoint of [2 cand, 2 b_prev]
      const double r_hat = forward_rho(emid, x, cand);
      // the forward density at emid grows with the candidate edge
      if (r_hat < rho_at(emid))
        lo = cand;
      else
        hi = cand;
    }
    b[i] = 0.5 * (lo + hi);
    xs.push_back(x);
    bs.push_back(b[i]);
  }
  return b;
}

OracleSpec OracleSpec::sl2r(double alpha, double eta) {
  OracleSpec s;
  s.family = Family::SL2R;
  s.alpha = alpha;
  s.eta = eta;
  return s;
}
OracleSpec OracleSpec::hw(double alpha) {
  OracleSpec s;
  s.family = Family::HW;
  s.alpha = alpha;
  return s;
}
OracleSpec OracleSpec::su2(double alpha, double j) {
  OracleSpec s;
  s.family = Family::SU2;
  s.alpha = alpha;
  s.j = j;
  return s;
}
OracleSpec OracleSpec::open_exact(double gamma, double u, double eta) {
  OracleSpec s;
  s.family = Family::OpenExact;
  s.gamma = gamma;
  s.u = u;
  s.eta = eta;
  return s;
}
OracleSpec OracleSpec::large_q_syk(double coupling, double q) {
  OracleSpec s;
  s.family = Family::LargeQSyk;
  s.coupling = coupling;
  s.q = q;
  return s;
}
OracleSpec OracleSpec::cft(double delta, double beta) {
  OracleSpec s;
  s.family = Family::Cft;
  s.delta = delta;
  s.beta = beta;
  return s;
}
OracleSpec OracleSpec::diss_syk(double coupling, double lambda_tilde, double q) {
  OracleSpec s;
  s.family = Family::DissSykAutocorr;
  s.coupling = coupling;
  s.lambda_tilde = lambda_tilde;
  s.q = q;
  return s;
}

std::vector<double> tangent_numbers(int m) {
  // tan series: c_{k+1} = (delta_{k0} + sum c_i c_j) / (k+1); T_k = c_{2k-1} (2k-1)!
  const int order = 2 * m;
  std::vector<double> c(order + 1, 0.0);
  for (int k = 0; k < order; ++k) {
    double s = (k == 0) ? 1.0 : 0.0;
    for (int i = 0; i <= k; ++i) s += c[i] * c[k - i];
    c[k + 1] = s / (k + 1);
  }
  std::vector<double> T(m + 1, 0.0);
  double f = 1.0;
  int cur = 0;
  for (int k = 1; k <= m; ++k) {
    while (cur < 2 * k - 1) f *= ++cur;
    T[k] = c[2 * k - 1] * f;
  }
  return T;
}

namespace {

double pochhammer_ratio_sqrt(double eta, int n) {
  // sqrt((eta)_n / n!)
  double acc = 0;
  for (int k = 0; k < n; ++k) acc += std::log(eta + k) - std::log(double(k + 1));
  return std::exp(0.5 * acc);
}

double log_binom(double n, int k) {
  return std::lgamma(n + 1) - std::lgamma(double(k) + 1) - std::lgamma(n - k + 1);
}

double ipow(double x, long n) {
  double r = 1;
  for (; n > 0; --n) r *= x;
  return r;
}

}  // namespace

Oracle oracle(const OracleSpec& spec) {
  using F = OracleSpec::Family;
  Oracle o;
  o.spec = spec;
  switch (spec.family) {
    case F::SL2R:
    case F::Cft:
    case F::LargeQSyk: {
      double alpha = spec.alpha, eta = spec.eta;
      if (spec.family == F::Cft) {
        if (spec.delta <= 0 || spec.beta <= 0) throw DomainError("cft oracle: delta, beta > 0");
        alpha = kPi / spec.beta;
        eta = 2 * spec.delta;
      } else if (spec.family == F::LargeQSyk) {
        if (spec.coupling <= 0 || spec.q < 2) throw DomainError("large-q oracle: bad params");
        alpha = spec.coupling;
        eta = 2.0 / spec.q;
      } else if (alpha <= 0 || eta <= 0) {
        throw DomainError("sl2r oracle: alpha, eta > 0 required");
      }
      o.b = [alpha, eta](int n) { return alpha * std::sqrt(n * (n - 1 + eta)); };
      o.a = [](int) { return cxd(0); };
      o.phi = [alpha, eta](int n, double t) {
        const double th = std::tanh(alpha * t);
        return cxd(pochhammer_ratio_sqrt(eta, n) *
                   std::pow(1.0 / std::cosh(alpha * t), eta) * ipow(th, n));
      };
      o.dphi = [alpha, eta](int n, double t) {
        const double th = std::tanh(alpha * t);
        const double sech2 = 1 - th * th;
        const double pref = pochhammer_ratio_sqrt(eta, n) *
                            std::pow(1.0 / std::cosh(alpha * t), eta);
        const double grow = n > 0 ? n * ipow(th, n - 1) * sech2 : 0.0;
        return cxd(alpha * pref * (grow - eta * ipow(th, n + 1)));
      };
      o.K = [alpha, eta](double t) { return eta * std::pow(std::sinh(alpha * t), 2); };
      o.varK = [alpha, eta](double t) {
        const double s = std::sinh(alpha * t), c = std::cosh(alpha * t);
        return eta * s * s * c * c;
      };
      o.Z = [](double) { return 1.0; };
      o.autocorr = [alpha, eta](double t) {
        return cxd(std::pow(1.0 / std::cosh(alpha * t), eta));
      };
      if (spec.family == F::LargeQSyk) {
        const double q = spec.q, jj = spec.coupling;
        o.moments = [q, jj](int n_max) {
          const auto T = tangent_numbers(n_max / 2 + 1);
          std::vector<cxd> m(n_max + 1, cxd(0));
          m[0] = 1;
          for (int n = 1; 2 * n <= n_max; ++n)
            m[2 * n] = (2.0 / q) * std::pow(jj, 2 * n) * T[n];
          return m;
        };
      }
      break;
    }
    case F::HW: {
      const double alpha = spec.alpha;
      if (alpha <= 0) throw DomainError("hw oracle: alpha > 0 required");
      o.b = [alpha](int n) { return alpha * std::sqrt(double(n)); };
      o.a = [](int) { return cxd(0); };
      o.phi = [alpha](int n, double t) {
        double logv = -0.5 * alpha * alpha * t * t + n * std::log(std::abs(alpha * t)) -
                      0.5 * std::lgamma(double(n) + 1);
        double sgn = (alpha * t < 0 && n % 2) ? -1.0 : 1.0;
        return cxd(t == 0 ? (n == 0 ? 1.0 : 0.0) : sgn * std::exp(logv));
      };
      o.dphi = [alpha](int n, double t) {
        const double gauss = std::exp(-0.5 * alpha * alpha * t * t);
        const double invsq = std::exp(-0.5 * std::lgamma(double(n) + 1));
        const double grow = n > 0 ? n * ipow(alpha * t, n - 1) * alpha : 0.0;
        return cxd(invsq * gauss * (grow - alpha * alpha * t * ipow(alpha * t, n)));
      };
      o.K = [alpha](double t) { return alpha * alpha * t * t; };
      o.varK = o.K;
      o.Z = [](double) { return 1.0; };
      o.autocorr = [alpha](double t) { return cxd(std::exp(-0.5 * alpha * alpha * t * t)); };
      o.moments = [alpha](int n_max) {
        std::vector<cxd> m(n_max + 1, cxd(0));
        m[0] = 1;
        double df = 1;
        for (int n = 1; 2 * n <= n_max; ++n) {
          df *= (2 * n - 1);
          m[2 * n] = std::pow(alpha, 2 * n) * df;
        }
        return m;
      };
      break;
    }
    case F::SU2: {
      const double alpha = spec.alpha, j = spec.j;
      if (alpha <= 0 || j <= 0 || std::abs(2 * j - std::lround(2 * j)) > 1e-12)
        throw DomainError("su2 oracle: alpha > 0 and half-integer j required");
      const int dk = static_cast<int>(std::lround(2 * j)) + 1;
      o.krylov_dim = dk;
      o.b = [alpha, j, dk](int n) {
        if (n >= dk) return 0.0;
        return alpha * std::sqrt(n * (2 * j - n + 1));
      };
      o.a = [](int) { return cxd(0); };
      o.phi = [alpha, j, dk](int n, double t) {
        if (n >= dk) return cxd(0);
        const double c = std::cos(alpha * t), s = std::sin(alpha * t);
        const double mag = std::exp(0.5 * log_binom(2 * j, n));
        return cxd(mag * ipow(c, std::lround(2 * j) - n) * ipow(s, n));
      };
      o.dphi = [alpha, j, dk](int n, double t) {
        if (n >= dk) return cxd(0);
        const double c = std::cos(alpha * t), s = std::sin(alpha * t);
        const double mag = std::exp(0.5 * log_binom(2 * j, n));
        const long tj = std::lround(2 * j);
        const double grow = n > 0 ? n * ipow(c, tj - n + 1) * ipow(s, n - 1) : 0.0;
        return cxd(alpha * mag * (grow - (tj - n) * ipow(c, tj - n - 1) * ipow(s, n + 1)));
      };
      o.K = [alpha, j](double t) { return 2 * j * std::pow(std::sin(alpha * t), 2); };
      o.varK = [alpha, j](double t) {
        const double s2 = std::pow(std::sin(alpha * t), 2);
        return 2 * j * s2 * (1 - s2);
      };
      o.Z = [](double) { return 1.0; };
      o.autocorr = [alpha, j](double t) { return cxd(std::pow(std::cos(alpha * t), 2 * j)); };
      break;
    }
    case F::OpenExact:
    case F::DissSykAutocorr: {
      double gamma = spec.gamma, u = spec.u, eta = spec.eta;
      if (spec.family == F::DissSykAutocorr) {
        // identify with the exactly solvable open chain
        const double jj = spec.coupling, lt = spec.lambda_tilde;
        gamma = std::sqrt(jj * jj + 0.25 * lt * lt);
        u = 0.5 * lt / gamma;
        eta = 2.0 / spec.q;
      }
      if (gamma <= 0 || eta <= 0 || u < 0 || u >= 1)
        throw DomainError("open oracle: gamma, eta > 0 and u in [0,1) required");
      o.b = [gamma, u, eta](int n) {
        return gamma * std::sqrt((1 - u * u) * n * (n - 1 + eta));
      };
      o.a = [gamma, u, eta](int n) { return cxd(0, u * gamma * (2 * n + eta)); };
      o.phi = [gamma, u, eta](int n, double t) {
        const double th = std::tanh(gamma * t);
        const double base = th / (1 + u * th);
        return cxd(std::pow(1.0 / std::cosh(gamma * t), eta) / std::pow(1 + u * th, eta) *
                   std::pow(1 - u * u, 0.5 * n) * pochhammer_ratio_sqrt(eta, n) *
                   ipow(base, n));
      };
      o.dphi = [gamma, u, eta](int n, double t) {
        const double th = std::tanh(gamma * t);
        const double sech2 = 1 - th * th;
        const double opu = 1 + u * th;
        const double base = th / opu;
        const double pref = std::pow(1.0 / std::cosh(gamma * t), eta) / std::pow(opu, eta);
        const double dpref = -eta * gamma * pref * (th + u) / opu;
        const double dbase = gamma * sech2 / (opu * opu);
        const double amp = std::pow(1 - u * u, 0.5 * n) * pochhammer_ratio_sqrt(eta, n);
        const double grow = n > 0 ? n * ipow(base, n - 1) * dbase : 0.0;
        return cxd(amp * (grow * pref + ipow(base, n) * dpref));
      };
      o.K = [gamma, u, eta](double t) {
        const double th = std::tanh(gamma * t);
        return eta * (1 - u * u) * th * th /
               (1 + 2 * u * th - (1 - 2 * u * u) * th * th);
      };
      o.varK = [gamma, u, eta](double t) {
        const double th = std::tanh(gamma * t);
        const double den = 1 + 2 * u * th - (1 - 2 * u * u) * th * th;
        return eta * (1 - u * u) * th * th * std::pow(u * th + 1, 2) / (den * den);
      };
      o.Z = [gamma, u, eta](double t) {
        return std::pow(u * (u * std::cosh(2 * gamma * t) + std::sinh(2 * gamma * t)) -
                            u * u + 1,
                        -eta);
      };
      {
        const double g2 = gamma, u2 = u, e2 = eta;
        o.autocorr = [g2, u2, e2](double t) {
          const double th = std::tanh(g2 * t);
          return cxd(std::pow(1.0 / std::cosh(g2 * t), e2) / std::pow(1 + u2 * th, e2));
        };
      }
      if (spec.family == F::DissSykAutocorr) {
        // leading-order moment polynomials in w = i lambda_tilde
        const double q = spec.q, lt = spec.lambda_tilde, jj = spec.coupling;
        o.moments = [q, lt, jj](int n_max) {
          std::vector<cxd> m(n_max + 1, cxd(0));
          m[0] = 1;
          const cxd w = kI * lt;
          // triangle T(n,k) = (k+1) T(n-1,k) + (2n-4k) T(n-1,k-1), T(1,0) = 1
          std::vector<std::vector<double>> T(n_max + 1);
          if (n_max >= 1) T[1] = {1.0};
          for (int n = 2; n <= n_max; ++n) {
            const int kmax = (n - 1) / 2;
            T[n].assign(kmax + 1, 0.0);
            for (int k = 0; k <= kmax; ++k) {
              double v = 0;
              if (k < static_cast<int>(T[n - 1].size())) v += (k + 1) * T[n - 1][k];
              if (k >= 1 && k - 1 < static_cast<int>(T[n - 1].size()))
                v += (2 * n - 4 * k) * T[n - 1][k - 1];
              T[n][k] = v;
            }
          }
          if (n_max >= 1) m[1] = (2.0 / q) * (w / 2.0);
          for (int n = 2; n <= n_max; ++n) {
            cxd acc = 0;
            for (int k = 0; k <= n / 2 - 1; ++k) {
              if (k >= static_cast<int>(T[n - 1].size())) break;
              acc += T[n - 1][k] * std::pow(w / jj, n - 2 * k - 2);
            }
            m[n] = (2.0 / q) * acc * std::pow(jj, n);
          }
          return m;
        };
      }
      break;
    }
  }

  // moments via the series generator when no exact table applies
  if (!o.moments) {
    const OracleSpec s2 = spec;
    o.moments = [s2](int n_max) {
      series::AcParams<double> p;
      switch (s2.family) {
        case F::SL2R:
          p.family = series::AcFamily::SechPow;
          p.alpha = s2.alpha;
          p.eta = s2.eta;
          break;
        case F::Cft:
          p.family = series::AcFamily::SechPow;
          p.alpha = kPi / s2.beta;
          p.eta = 2 * s2.delta;
          break;
        case F::SU2:
          p.family = series::AcFamily::CosPow;
          p.alpha = s2.alpha;
          p.eta = 2 * s2.j;
          break;
        case F::OpenExact:
          p.family = series::AcFamily::OpenExact;
          p.alpha = s2.gamma;
          p.eta = s2.eta;
          p.u = s2.u;
          break;
        default:
          throw DomainError("oracle moments: unsupported family");
      }
      const auto c = series::autocorr_series<double>(p, 0.0, n_max);
      std::vector<cxd> m(n_max + 1);
      double fact = 1;
      for (int n = 0; n <= n_max; ++n) {
        if (n > 0) fact *= n;
        m[n] = fact * c[n] / std::pow(kI, n);
      }
      return m;
    };
  }
  return o;
}

Oracle::Residuals Oracle::self_check(const RVec& t_grid, int n_sites) const {
  Residuals r;
  for (Eigen::Index ti = 0; ti < t_grid.size(); ++ti) {
    const double t = t_grid[ti];
    double z = 0, ksum = 0;
    for (int n = 0; n < n_sites; ++n) {
      const double pn = std::norm(phi(n, t));
      z += pn;
      ksum += n * pn;
    }
    const double zt = Z ? Z(t) : 1.0;
    r.normalization = std::max(r.normalization, std::abs(z - zt));
    if (K) r.complexity = std::max(r.complexity, std::abs(ksum / zt - K(t)) / (1 + K(t)));
    if (!dphi) continue;
    for (int n = 0; n < std::min(n_sites - 1, 40); ++n) {
      cxd rhs = -b(n + 1) * phi(n + 1, t) + kI * a(n) * phi(n, t);
      if (n > 0) rhs += b(n) * phi(n - 1, t);
      r.recurrence = std::max(r.recurrence, std::abs(dphi(n, t) - rhs) / (1 + std::abs(rhs)));
    }
  }
  return r;
}

}  // namespace krylov
