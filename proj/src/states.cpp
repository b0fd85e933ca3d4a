#include "krylov/states.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "krylov/opspace.hpp"

namespace krylov {

SpectrumDecomp SpectrumDecomp::compute(const Mat& H) {
  if (!approx_hermitian(H)) throw DomainError("SpectrumDecomp: H must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  SpectrumDecomp s;
  s.energies = es.eigenvalues();
  s.vectors = es.eigenvectors();
  return s;
}

double SpectrumDecomp::reconstruction_error(const Mat& H) const {
  const Mat R = vectors * energies.asDiagonal() * vectors.adjoint() - H;
  return R.cwiseAbs().maxCoeff();
}

RVec SpectrumDecomp::boltzmann(double beta) const {
  const double e0 = energies.minCoeff();
  RVec w(energies.size());
  for (Eigen::Index i = 0; i < energies.size(); ++i)
    w[i] = std::exp(-beta * (energies[i] - e0));
  w /= w.sum();
  return w;
}

Vec tfd_state(const SpectrumDecomp& spec, double beta) {
  if (beta < 0) throw DomainError("tfd_state: beta >= 0 required");
  const Eigen::Index d = spec.energies.size();
  const RVec w = spec.boltzmann(beta);
  Vec tfd = Vec::Zero(d * d);
  // sum_n sqrt(w_n) |n> (x) |n>*, expressed in the computational basis
  for (Eigen::Index n = 0; n < d; ++n) {
    const Vec vn = spec.vectors.col(n);
    const double c = std::sqrt(w[n]);
    for (Eigen::Index i = 0; i < d; ++i)
      tfd.segment(i * d, d) += c * vn[i] * vn.conjugate();
  }
  tfd.normalize();
  return tfd;
}

Vec tfd_survival(const SpectrumDecomp& spec, double beta, const RVec& t_grid) {
  const RVec w = spec.boltzmann(beta);
  Vec s(t_grid.size());
  for (Eigen::Index j = 0; j < t_grid.size(); ++j) {
    cxd acc = 0;
    for (Eigen::Index n = 0; n < w.size(); ++n)
      acc += w[n] * std::exp(cxd(0, -spec.energies[n] * t_grid[j]));
    s[j] = acc;
  }
  return s;
}

RVec sff(const SpectrumDecomp& spec, double beta, const RVec& t_grid,
         const std::function<double(double)>& filter) {
  RVec out(t_grid.size());
  if (!filter) {
    const Vec s = tfd_survival(spec, beta, t_grid);
    for (Eigen::Index j = 0; j < t_grid.size(); ++j) out[j] = std::norm(s[j]);
    return out;
  }
  RVec g(spec.energies.size());
  for (Eigen::Index n = 0; n < g.size(); ++n) g[n] = filter(spec.energies[n]);
  for (Eigen::Index j = 0; j < t_grid.size(); ++j) {
    cxd acc = 0;
    for (Eigen::Index n = 0; n < g.size(); ++n)
      acc += g[n] * std::exp(cxd(0, -spec.energies[n] * t_grid[j]));
    out[j] = std::norm(acc);
  }
  return out;
}

SpreadResult spread_complexity(const Mat& H, const Vec& psi0, const RVec& t_grid, int max_n) {
  SpreadResult res;
  StateLanczosOptions opt;
  opt.max_n = max_n > 0 ? max_n : static_cast<int>(H.rows());
  opt.store_basis = false;
  res.lanczos = lanczos_state(H, psi0, opt);
  const int L = res.lanczos.terminated ? res.lanczos.krylov_dim
                                       : static_cast<int>(res.lanczos.a.size());
  RVec b = res.lanczos.b.head(L - 1);
  RVec a = res.lanczos.a.head(L);
  res.wavefunction = propagate(ChainSpec::state(std::move(b), std::move(a)), t_grid);
  res.trace = complexity_trace(res.wavefunction, false);
  return res;
}

SpreadResult spread_tfd(const SpectrumDecomp& spec, double beta, const RVec& t_grid,
                        TfdEvolution evolution) {
  // In the energy eigenbasis the doubled-space problem reduces to the
  // coherent Gibbs state with the diagonal Hamiltonian (one copy); the
  // symmetric-half evolution shifts nothing but the effective spectrum scale.
  const Eigen::Index d = spec.energies.size();
  const RVec w = spec.boltzmann(beta);
  Vec seed(d);
  for (Eigen::Index n = 0; n < d; ++n) seed[n] = std::sqrt(w[n]);
  Mat Heff = Mat::Zero(d, d);
  // both H x I and (H x I + I x H)/2 act on the TFD with eigenvalue E_n
  (void)evolution;
  for (Eigen::Index n = 0; n < d; ++n) Heff(n, n) = spec.energies[n];
  return spread_complexity(Heff, seed, t_grid);
}

SpectralComplexityResult spectral_complexity(const SpectrumDecomp& spec, double beta,
                                             const RVec& t_grid) {
  const Eigen::Index d = spec.energies.size();
  const double cut = 1e-12 * std::max(spec.width(), 1e-300);
  SpectralComplexityResult res;
  res.t = t_grid;
  res.value = RVec::Zero(t_grid.size());
  // Boltzmann pair weights (shift-invariant): e^{-beta(Ei+Ej)} / Z(2 beta)
  const double e0 = spec.energies.minCoeff();
  RVec bw(d);
  double z2 = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    bw[i] = std::exp(-beta * (spec.energies[i] - e0));
    z2 += bw[i] * bw[i];
  }
  std::vector<std::pair<double, double>> pairs;  // (gap, weight)
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      const double gap = spec.energies[i] - spec.energies[j];
      if (std::abs(gap) < cut) {
        ++res.skipped_pairs;
        continue;
      }
      pairs.emplace_back(gap, bw[i] * bw[j]);
    }
  res.skipped_pairs /= 2;  // counted twice above
  for (Eigen::Index k = 0; k < t_grid.size(); ++k) {
    const double t = t_grid[k];
    double acc = 0;
    for (const auto& [gap, wp] : pairs) {
      const double s = std::sin(0.5 * t * gap) / (0.5 * gap);
      acc += wp * s * s;
    }
    res.value[k] = acc / (z2 * double(d));
  }
  return res;
}

RVec gue_spectral_complexity_analytic(int n, const RVec& t_grid) {
  // F(t) with F'' = 2 (J1(2t)/t)^2, F(0)=1, F'(0)=0, integrated on a fine
  // grid, plus the closed connected part.
  RVec out(t_grid.size());
  const double tmax = t_grid[t_grid.size() - 1];
  const int steps = std::max(2000, static_cast<int>(tmax / 0.005));
  const double h = tmax / steps;
  std::vector<double> F(steps + 1);
  auto g = [](double t) {
    if (t < 1e-8) return 2.0 * (1.0 - t * t);
    const double j1 = std::cyl_bessel_j(1, 2 * t);
    return 2.0 * (j1 / t) * (j1 / t);
  };
  double f = 1, fp = 0;
  F[0] = 1;
  for (int i = 0; i < steps; ++i) {
    // RK4 on (f, f')
    const double t = i * h;
    auto acc = [&](double tt) { return g(tt); };
    const double k1f = fp, k1p = acc(t);
    const double k2f = fp + 0.5 * h * k1p, k2p = acc(t + 0.5 * h);
    const double k3f = fp + 0.5 * h * k2p, k3p = acc(t + 0.5 * h);
    const double k4f = fp + h * k3p, k4p = acc(t + h);
    f += h / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
    fp += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    F[i + 1] = f;
  }
  for (Eigen::Index k = 0; k < t_grid.size(); ++k) {
    const double t = t_grid[k];
    const int i0 = std::min(steps - 1, static_cast<int>(t / h));
    const double frac = t / h - i0;
    const double Ft = (1 - frac) * F[i0] + frac * F[i0 + 1];
    double val = Ft - 1 + n - 16 * t / (3 * kPi);
    if (t < 2.0 * n) {
      const double r = std::sqrt(std::max(0.0, 1 - t * t / (4.0 * n * n)));
      val += (t / (6 * kPi)) * (t * t / (double(n) * n) + 26) * r -
             (2.0 * n / kPi) * (t * t / (double(n) * n) + 1) * std::asin(r);
    }
    out[k] = val;
  }
  return out;
}

DensityChain density_krylov(const Mat& H, const Mat& rho0, int max_n, double psd_tol) {
  if (!approx_hermitian(H)) throw DomainError("density_krylov: H must be Hermitian");
  if (!approx_hermitian(rho0)) throw DomainError("density_krylov: rho0 must be Hermitian");
  const double tr = rho0.trace().real();
  if (std::abs(tr - 1.0) > 1e-8) throw DomainError("density_krylov: rho0 must have unit trace");
  {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho0 + rho0.adjoint()));
    if (es.eigenvalues().minCoeff() < -psd_tol)
      throw DomainError("density_krylov: rho0 fails positive semidefiniteness");
  }
  const int d = static_cast<int>(H.rows());
  const auto L = build_liouvillian(H);
  const InnerProduct ip(InnerProductSpec::infinite_temperature());

  // Uniformly scaled chain: run the orthonormal recursion on rho0/|rho0| and
  // rescale every element by |rho0|, so L rho_n = b_{n+1} rho_{n+1} + b_n
  // rho_{n-1} holds verbatim with Tr(rho_0) = 1.
  const double w = ip.norm(rho0);
  LanczosOptions opt;
  opt.max_n = max_n;
  opt.store_basis = true;
  opt.reortho = Reortho::Full;
  auto lan = lanczos_operator(L, rho0 / w, ip, opt);

  DensityChain chain;
  chain.b = lan.b;
  chain.krylov_dim = lan.krylov_dim;
  chain.terminated = lan.terminated;
  chain.flags = lan.flags;
  chain.purity0 = double(d) * w * w;  // Tr(rho0^2)
  const int n_elems = static_cast<int>(lan.basis.size());
  chain.elements.reserve(n_elems);
  chain.traces.resize(n_elems);
  for (int n = 0; n < n_elems; ++n) {
    Mat el = w * devectorize(lan.basis[n]);
    chain.traces[n] = el.trace().real();
    if (std::abs(el.trace().imag()) > 1e-9)
      chain.flags.warn("complex trace encountered on the density chain");
    chain.elements.push_back(std::move(el));
  }
  return chain;
}

Mat DensityChain::reconstruct_identity() const {
  if (elements.empty()) throw DomainError("reconstruct_identity: no stored elements");
  const int d = static_cast<int>(elements[0].rows());
  // components (rho_n | I) / (rho_n | rho_n) with the uniform norm w^2 = P0/d
  const double w2 = purity0 / d;
  Mat id = Mat::Zero(d, d);
  for (size_t n = 0; n < elements.size(); ++n) {
    const double comp = traces[n] / double(d);  // (rho_n | I) under Tr(.)/d
    id += (comp / w2) * elements[n];
  }
  return id;
}

KrylovWavefunction density_propagate(const DensityChain& chain, const RVec& t_grid) {
  const int L = chain.terminated ? chain.krylov_dim : static_cast<int>(chain.b.size()) + 1;
  RVec b = chain.b.head(L - 1);
  return propagate(ChainSpec::density(std::move(b)), t_grid);
}

Mat density_reconstruct(const DensityChain& chain, const KrylovWavefunction& wf,
                        Eigen::Index t_index) {
  const int d = static_cast<int>(chain.elements[0].rows());
  Mat rho = Mat::Zero(d, d);
  static constexpr cxd mi_pow[4] = {cxd(1, 0), cxd(0, -1), cxd(-1, 0), cxd(0, 1)};
  for (int n = 0; n < static_cast<int>(wf.amp.rows()) &&
                  n < static_cast<int>(chain.elements.size());
       ++n)
    rho += mi_pow[n % 4] * wf.amp(n, t_index) * chain.elements[n];
  return rho;
}

}  // namespace krylov
