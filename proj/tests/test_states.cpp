#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "krylov/opspace.hpp"
#include "krylov/models.hpp"
#include "krylov/states.hpp"
#include "test_util.hpp"

using namespace krylov;
using namespace krylov::test;

TEST_CASE("thermofield double construction") {
  // beta = 0, d = 2: maximally entangled
  const Mat h = random_hermitian(2, 3);
  auto spec = SpectrumDecomp::compute(h);
  CHECK(spec.reconstruction_error(h) < 1e-12);
  Vec tfd = tfd_state(spec, 0.0);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(tfd[0] - cxd(s)) < 1e-12);
  CHECK(std::abs(tfd[1]) < 1e-12);
  CHECK(std::abs(tfd[2]) < 1e-12);
  CHECK(std::abs(tfd[3] - cxd(s)) < 1e-12);

  // beta -> infinity: ground-state product (non-degenerate)
  const Mat h4 = random_hermitian(4, 5);
  auto s4 = SpectrumDecomp::compute(h4);
  Vec cold = tfd_state(s4, 500.0);
  Vec vg = s4.vectors.col(0);
  Vec expect = Vec::Zero(16);
  for (int i = 0; i < 4; ++i) expect.segment(i * 4, 4) += vg[i] * vg.conjugate();
  CHECK(std::abs(std::abs(cold.dot(expect)) - 1.0) < 1e-8);

  // reduced density matrix on one copy is the Gibbs state
  Vec warm = tfd_state(s4, 1.3);
  Mat m = devectorize(warm);  // amplitudes as a matrix
  Mat red = m * m.adjoint();
  Mat gibbs = Mat::Zero(4, 4);
  const RVec w = s4.boltzmann(1.3);
  for (int n = 0; n < 4; ++n)
    gibbs += w[n] * s4.vectors.col(n) * s4.vectors.col(n).adjoint();
  CHECK(max_abs(red - gibbs) < 1e-10);
}

TEST_CASE("survival amplitude equals the partition-function ratio") {
  const int d = 8;
  const Mat h = random_hermitian(d, 7);
  auto spec = SpectrumDecomp::compute(h);
  const double beta = 0.8;
  Vec tfd = tfd_state(spec, beta);
  RVec t = RVec::LinSpaced(9, 0.0, 4.0);
  Vec surv = tfd_survival(spec, beta, t);
  for (int j = 0; j < t.size(); ++j) {
    // one-sided evolution in the doubled space: vec(e^{-iHt} M)
    Mat m = devectorize(tfd);
    Mat u = Mat::Zero(d, d);
    for (int n = 0; n < d; ++n)
      u += std::exp(cxd(0, -spec.energies[n] * t[j])) * spec.vectors.col(n) *
           spec.vectors.col(n).adjoint();
    const cxd direct = tfd.dot(vectorize(Mat(u * m)));
    CHECK(std::abs(direct - surv[j]) < 1e-12);
  }
}

TEST_CASE("spectral form factor basics") {
  const Mat h = random_hermitian(6, 11);
  auto spec = SpectrumDecomp::compute(h);
  RVec t = RVec::LinSpaced(11, 0.0, 5.0);
  RVec f = sff(spec, 0.7, t);
  CHECK(f[0] == doctest::Approx(1.0));

  // two-level system at beta = 0: (1 + cos w t)/2
  Mat h2 = Mat::Zero(2, 2);
  h2(1, 1) = 1.7;
  auto s2 = SpectrumDecomp::compute(h2);
  RVec f2 = sff(s2, 0.0, t);
  for (int j = 0; j < t.size(); ++j)
    CHECK(f2[j] == doctest::Approx((1 + std::cos(1.7 * t[j])) / 2).epsilon(1e-12));

  // eigenvalue filter route
  RVec f3 = sff(s2, 0.0, t, [](double) { return 0.5; });
  for (int j = 0; j < t.size(); ++j)
    CHECK(f3[j] == doctest::Approx(0.25 * std::norm(1.0 + std::exp(cxd(0, -1.7 * t[j])))));
}

TEST_CASE("spread complexity: eigenstate, direct projection, survival") {
  const int d = 32;
  const Mat h = random_hermitian(d, 13);
  auto spec = SpectrumDecomp::compute(h);

  // eigenstate seed: identically zero complexity
  Vec eig0 = spec.vectors.col(3);
  RVec t = RVec::LinSpaced(9, 0.0, 3.0);
  auto res = spread_complexity(h, eig0, t);
  CHECK(res.trace.K.cwiseAbs().maxCoeff() < 1e-12);

  // generic seed: amplitudes equal direct projections on the Krylov basis
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0, 1);
  Vec psi0(d);
  for (int i = 0; i < d; ++i) psi0[i] = cxd(g(rng), g(rng));
  psi0.normalize();
  auto sp = spread_complexity(h, psi0, t);

  StateLanczosOptions lopt;
  lopt.max_n = d;
  lopt.store_basis = true;
  auto lan = lanczos_state(h, psi0, lopt);
  for (int j = 0; j < t.size(); ++j) {
    Vec psit = Vec::Zero(d);
    for (int n = 0; n < d; ++n)
      psit += std::exp(cxd(0, -spec.energies[n] * t[j])) * spec.vectors.col(n) *
              (spec.vectors.col(n).adjoint() * psi0);
    for (size_t n = 0; n < lan.basis.size(); ++n) {
      const double direct = std::norm(lan.basis[n].dot(psit));
      const double viachain = std::norm(sp.wavefunction.amp(n, j));
      CHECK(std::abs(direct - viachain) < 1e-8);
    }
  }

  // survival probability from the chain equals the SFF of the TFD seed
  auto spt = spread_tfd(spec, 0.9, t);
  RVec f = sff(spec, 0.9, t);
  for (int j = 0; j < t.size(); ++j)
    CHECK(std::abs(std::norm(spt.wavefunction.amp(0, j)) - f[j]) < 1e-10);
}

TEST_CASE("spread minimality against sampled bases") {
  const int d = 16;
  const Mat h = random_hermitian(d, 19);
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0, 1);
  Vec psi0(d);
  for (int i = 0; i < d; ++i) psi0[i] = cxd(g(rng), g(rng));
  psi0.normalize();
  RVec t = RVec::LinSpaced(5, 0.0, 0.8);
  auto sp = spread_complexity(h, psi0, t);
  auto spec = SpectrumDecomp::compute(h);

  for (int rep = 0; rep < 50; ++rep) {
    Mat rnd = random_matrix(d, 100 + rep);
    Eigen::HouseholderQR<Mat> qr(rnd);
    Mat Q = qr.householderQ();
    // cost of the sampled basis; the Krylov basis minimizes it
    for (int j = 0; j < t.size(); ++j) {
      Vec psit = Vec::Zero(d);
      for (int n = 0; n < d; ++n)
        psit += std::exp(cxd(0, -spec.energies[n] * t[j])) * spec.vectors.col(n) *
                (spec.vectors.col(n).adjoint() * psi0);
      double cost = 0;
      for (int n = 0; n < d; ++n) cost += n * std::norm(Q.col(n).dot(psit));
      CHECK(cost >= sp.trace.K[j] - 1e-9);
    }
  }
}

TEST_CASE("spectral complexity: early growth and degenerate pairs") {
  // ensemble-averaged early window grows as t^2
  const int n = 64, samples = 20;
  RVec t = RVec::LinSpaced(6, 0.0, 0.25);
  RVec mean = RVec::Zero(t.size());
  for (int s = 0; s < samples; ++s) {
    RmtSpec rs;
    rs.ensemble = Ensemble::GUE;
    rs.n = n;
    rs.sigma = 1.0 / std::sqrt(double(n));
    rs.seed = 400 + s;
    auto spec = SpectrumDecomp::compute(rmt_sample(rs));
    mean += spectral_complexity(spec, 0.0, t).value;
  }
  mean /= samples;
  RVec lx(4), ly(4);
  for (int k = 1; k <= 4; ++k) {
    lx[k - 1] = std::log(t[k]);
    ly[k - 1] = std::log(mean[k]);
  }
  auto [slope, icpt] = fit_line(lx, ly);
  CHECK(std::abs(slope - 2.0) < 0.05);

  // explicit degeneracy is excluded and counted
  Mat hd = Mat::Zero(4, 4);
  hd(0, 0) = hd(1, 1) = 1.0;
  hd(2, 2) = 2.0;
  hd(3, 3) = 3.0;
  auto sd = SpectrumDecomp::compute(hd);
  auto res = spectral_complexity(sd, 0.0, RVec::LinSpaced(3, 0.0, 1.0));
  CHECK(res.skipped_pairs == 1);
}

TEST_CASE("density matrix chain: qubit example against brute-force gram-schmidt") {
  const Mat sz = sigma_z();
  Mat rho0 = Mat::Zero(2, 2);
  rho0 << 0.5, 0.5, 0.5, 0.5;  // |+><+|
  auto chain = density_krylov(sz, rho0, 10);
  REQUIRE(chain.terminated);
  CHECK(chain.krylov_dim == 3);
  REQUIRE(chain.b.size() == 2);
  // independent Gram-Schmidt oracle in the 4-dim operator space
  {
    InnerProduct ip(InnerProductSpec::infinite_temperature());
    auto L = build_liouvillian(sz);
    Mat e0 = rho0 / ip.norm(rho0);
    Mat a1 = L.apply(e0);
    const double b1 = ip.norm(a1);
    Mat e1 = a1 / b1;
    Mat a2 = L.apply(e1) - b1 * e0;
    const double b2 = ip.norm(a2);
    CHECK(chain.b[0] == doctest::Approx(b1).epsilon(1e-12));
    CHECK(chain.b[1] == doctest::Approx(b2).epsilon(1e-12));
    CHECK(b1 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(b2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
  CHECK(chain.traces[0] == doctest::Approx(1.0));
  CHECK(std::abs(chain.traces[1]) < 1e-12);
  CHECK(chain.traces[2] == doctest::Approx(-chain.b[0] / chain.b[1]).epsilon(1e-10));
}

TEST_CASE("density matrix chain: stationary state and random-instance identities") {
  const int d = 4;
  const Mat h = random_hermitian(d, 29);
  // maximally mixed state is stationary
  auto mm = density_krylov(h, Mat(Mat::Identity(d, d) / double(d)), 8);
  CHECK(mm.krylov_dim == 1);

  // random rho0: mix of a few projectors
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int rep = 0; rep < 6; ++rep) {
    Mat v = random_matrix(d, 500 + rep);
    Eigen::HouseholderQR<Mat> qr(v);
    Mat Q = qr.householderQ();
    RVec p(d);
    for (int i = 0; i < d; ++i) p[i] = u(rng);
    p /= p.sum();
    Mat rho0 = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) rho0 += p[i] * Q.col(i) * Q.col(i).adjoint();
    auto chain = density_krylov(h, rho0, 40);
    REQUIRE(chain.terminated);
    const int dk = chain.krylov_dim;

    // trace identities
    double prod = 1;
    for (int n = 0; n < dk; ++n) {
      if (n % 2 == 1) {
        CHECK(std::abs(chain.traces[n]) <= 1e-10);
      } else if (n > 0) {
        prod *= -chain.b[n - 2] / chain.b[n - 1];
        CHECK(std::abs(chain.traces[n] - prod) <= 1e-8 * std::abs(prod));
      }
      // hermiticity alternation
      const Mat& el = chain.elements[n];
      if (n % 2 == 0)
        CHECK(max_abs(el - el.adjoint()) <= 1e-9);
      else
        CHECK(max_abs(el + el.adjoint()) <= 1e-9);
    }

    // identity reconstruction is annihilated by the Liouvillian
    auto L = build_liouvillian(h);
    const Mat idr = chain.reconstruct_identity();
    CHECK(max_abs(L.apply(idr)) <= 1e-8 * max_abs(idr));

    // propagation: purity conservation and trace preservation
    RVec t = RVec::LinSpaced(13, 0.0, 5.0);
    auto wf = density_propagate(chain, t);
    for (int j = 0; j < t.size(); ++j) {
      double s2 = 0, trpres = 0;
      double w2n = 1;
      for (int n = 0; n < dk; ++n) {
        s2 += std::norm(wf.amp(n, j));
        if (n % 2 == 0) {
          trpres += wf.amp(n, j).real() * chain.traces[n] * (n % 4 == 2 ? -1.0 : 1.0);
        }
      }
      (void)w2n;
      // purity: P(t) = P(0) sum phi^2
      CHECK(std::abs(chain.purity0 * s2 - chain.purity0) <= 1e-9);
      // trace: sum (-i)^n phi_n Tr(rho_n) = 1
      CHECK(std::abs(trpres - 1.0) <= 1e-8);
      // direct reconstruction at a few times, against exact evolution
      if (j % 6 == 0) {
        const Mat rho_t = density_reconstruct(chain, wf, j);
        CHECK(std::abs(rho_t.trace().real() - 1.0) <= 1e-8);
        CHECK(max_abs(rho_t - rho_t.adjoint()) <= 1e-8);
        CHECK(std::abs((rho_t * rho_t).trace().real() - chain.purity0) <= 1e-8);
        auto spec = SpectrumDecomp::compute(h);
        Mat U = Mat::Zero(d, d);
        for (int n = 0; n < d; ++n)
          U += std::exp(cxd(0, -spec.energies[n] * t[j])) * spec.vectors.col(n) *
               spec.vectors.col(n).adjoint();
        CHECK(max_abs(rho_t - U * rho0 * U.adjoint()) <= 1e-8);
      }
    }
  }

  // positivity guard
  Mat bad = Mat::Zero(d, d);
  bad(0, 0) = -0.1;
  bad(1, 1) = 0.5;
  bad(2, 2) = 0.3;
  bad(3, 3) = 0.3;
  CHECK_THROWS_AS(density_krylov(h, bad, 8), DomainError);
}
