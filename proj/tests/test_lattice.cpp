#include <doctest.h>

#include "krylov/lattice.hpp"
#include "krylov/models.hpp"
#include "krylov/tridiag.hpp"
#include "test_util.hpp"

using namespace krylov;
using namespace krylov::test;

namespace {

ChainSpec oracle_chain(const Oracle& o, int sites) {
  RVec b(sites - 1);
  for (int n = 1; n < sites; ++n) b[n - 1] = o.b(n);
  if (o.spec.family == OracleSpec::Family::OpenExact ||
      o.spec.family == OracleSpec::Family::DissSykAutocorr) {
    Vec a(sites);
    for (int n = 0; n < sites; ++n) a[n] = o.a(n);
    return ChainSpec::open(std::move(b), std::move(a));
  }
  return ChainSpec::closed(std::move(b));
}

}  // namespace

TEST_CASE("propagation reproduces the closed-form wavefunctions") {
  SUBCASE("linear chain: sech tanh^n") {
    auto o = oracle(OracleSpec::sl2r(1.0, 1.0));
    auto chain = oracle_chain(o, 600);
    RVec t = RVec::LinSpaced(21, 0.0, 2.0);
    auto wf = propagate(chain, t);
    double worst = 0;
    for (int j = 0; j < t.size(); ++j)
      for (int n = 0; n <= 40; ++n)
        worst = std::max(worst, std::abs(wf.amp(n, j) - o.phi(n, t[j])));
    CHECK(worst <= 1e-8);
    // real amplitudes for the operator convention
    double imag = 0;
    for (int j = 0; j < t.size(); ++j) imag = std::max(imag, wf.amp.col(j).imag().cwiseAbs().maxCoeff());
    CHECK(imag <= 1e-12);
  }

  SUBCASE("square-root chain: gaussian wave packet") {
    auto o = oracle(OracleSpec::hw(1.0));
    auto chain = oracle_chain(o, 140);
    RVec t = RVec::LinSpaced(16, 0.0, 3.0);
    auto wf = propagate(chain, t);
    double worst = 0;
    for (int j = 0; j < t.size(); ++j)
      for (int n = 0; n <= 40; ++n)
        worst = std::max(worst, std::abs(wf.amp(n, j) - o.phi(n, t[j])));
    CHECK(worst <= 1e-8);
  }

  SUBCASE("open chain against the exact solution") {
    auto o = oracle(OracleSpec::open_exact(1.0, 0.1, 1.5));
    auto chain = oracle_chain(o, 280);
    RVec t = RVec::LinSpaced(61, 0.0, 3.0);
    auto wf = propagate(chain, t);
    double worst = 0;
    for (int j = 0; j < t.size(); ++j)
      for (int n = 0; n <= 60; ++n)
        worst = std::max(worst, std::abs(wf.amp(n, j) - o.phi(n, t[j])));
    CHECK(worst <= 1e-7);
    // eig request on a non-Hermitian chain reroutes with a notice
    auto wf2 = propagate(chain, RVec::LinSpaced(4, 0.0, 0.3), PropagationMethod::Eig);
    CHECK(wf2.flags.has("rerouted"));
  }

  SUBCASE("norm conservation for closed chains, eig and expm") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.3, 1.7);
    RVec b(49);
    for (int i = 0; i < 49; ++i) b[i] = u(rng);
    auto chain = ChainSpec::closed(b);
    RVec t = RVec::LinSpaced(31, 0.0, 6.0);
    for (auto method : {PropagationMethod::Eig, PropagationMethod::Expm}) {
      auto wf = propagate(chain, t, method);
      auto tr = complexity_trace(wf, false);
      CHECK((tr.Z.array() - 1.0).abs().maxCoeff() <= 1e-9);
    }
  }

  SUBCASE("adaptive ode path agrees with eig") {
    RVec b(59);
    for (int i = 0; i < 59; ++i) b[i] = std::sqrt(i + 1.0);
    auto chain = ChainSpec::closed(b);
    RVec t = RVec::LinSpaced(7, 0.0, 1.5);
    auto we = propagate(chain, t, PropagationMethod::Eig);
    auto wo = propagate(chain, t, PropagationMethod::AdaptiveOde);
    CHECK((we.amp - wo.amp).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("complexity traces of the coherent-state chains") {
  RVec t = RVec::LinSpaced(31, 0.0, 3.0);

  auto sl = oracle(OracleSpec::sl2r(1.0, 1.0));
  auto trs = complexity_trace(propagate(oracle_chain(sl, 1200), t), false);
  for (int j = 0; j < t.size(); ++j) {
    const double expect = std::pow(std::sinh(t[j]), 2);
    CHECK(std::abs(trs.K[j] - expect) <= 1e-7 * (1 + expect));
  }
  CHECK(trs.K[0] == 0.0);
  CHECK(trs.Z[0] == doctest::Approx(1.0));

  auto hw = oracle(OracleSpec::hw(1.0));
  auto trh = complexity_trace(propagate(oracle_chain(hw, 140), t), false);
  for (int j = 0; j < t.size(); ++j)
    CHECK(std::abs(trh.K[j] - t[j] * t[j]) <= 1e-8 * (1 + t[j] * t[j]));

  // SU(2) j = 3: K = 6 sin^2 t, exactly periodic with period pi
  auto su = oracle(OracleSpec::su2(1.0, 3.0));
  RVec tp = RVec::LinSpaced(41, 0.0, kPi);
  auto wf = propagate(oracle_chain(su, 7), tp);
  auto tru = complexity_trace(wf, false);
  for (int j = 0; j < tp.size(); ++j) {
    const double expect = 6 * std::pow(std::sin(tp[j]), 2);
    CHECK(std::abs(tru.K[j] - expect) <= 1e-9 * (1 + expect));
  }
  CHECK(std::abs(tru.K[tp.size() - 1]) <= 1e-9);  // back to the start after one period

  // entropy bounds and cumulant identities
  for (const auto* tr : {&trs, &trh, &tru}) {
    for (int j = 0; j < tr->t.size(); ++j) {
      CHECK(tr->S[j] >= -1e-12);
      CHECK(tr->K[j] >= -1e-12);
      CHECK(tr->varK[j] >= -1e-12);
    }
  }
  for (int j = 0; j < tru.t.size(); ++j) CHECK(tru.S[j] <= std::log(7.0) + 1e-12);
}

TEST_CASE("exact open-chain complexity") {
  RVec t = RVec::LinSpaced(25, 0.0, 18.0);
  SUBCASE("closed limit") {
    auto tr = open_complexity_exact(1.0, 1e-8, 1.5, t);
    for (int j = 0; j < t.size(); ++j) {
      const double expect = 1.5 * std::pow(std::sinh(t[j]), 2);
      CHECK(std::abs(tr.K[j] - expect) <= 1e-7 * (1 + expect));
    }
  }
  SUBCASE("saturation and late-time variance") {
    auto tr = open_complexity_exact(1.0, 0.1, 1.5, t);
    CHECK(std::abs(open_complexity_saturation(0.1, 1.5) - 6.75) < 1e-14);
    CHECK(std::abs(tr.K[t.size() - 1] - 6.75) <= 1e-6);
    // exact late-time variance eta (1 - u^2) / (4 u^2), close to eta / (4 u^2)
    const double exact_var = 1.5 * (1 - 0.01) / (4 * 0.01);
    CHECK(std::abs(tr.varK[t.size() - 1] - exact_var) <= 1e-6 * exact_var);
    CHECK(std::abs(exact_var - 1.5 / (4 * 0.01)) <= 0.01 * (1.5 / 0.04));
    // dK ~ K at late times
    const double ratio = std::sqrt(tr.varK[t.size() - 1]) / tr.K[t.size() - 1];
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
  }
  SUBCASE("matches the propagated chain and the norm identity") {
    const double g = 1.0, u = 0.1, eta = 1.5;
    auto o = oracle(OracleSpec::open_exact(g, u, eta));
    RVec tt = RVec::LinSpaced(41, 0.0, 4.0);
    auto wf = propagate(oracle_chain(o, 320), tt);
    auto tr = complexity_trace(wf, true);
    auto ex = open_complexity_exact(g, u, eta, tt);
    for (int j = 0; j < tt.size(); ++j) {
      CHECK(std::abs(tr.K[j] - ex.K[j]) <= 1e-6 * (1 + ex.K[j]));
      CHECK(std::abs(tr.Z[j] - ex.Z[j]) <= 1e-8 * ex.Z[j]);
      if (j > 0) CHECK(tr.Z[j] <= tr.Z[j - 1] + 1e-12);  // monotone loss
    }
    // d/dt log Z = -2 u g (2K + eta), finite differences
    const double h = tt[1] - tt[0];
    for (int j = 2; j + 2 < tt.size(); ++j) {
      const double dlz = (-std::log(tr.Z[j + 2]) + 8 * std::log(tr.Z[j + 1]) -
                          8 * std::log(tr.Z[j - 1]) + std::log(tr.Z[j - 2])) /
                         (12 * h);
      const double rhs = -2 * u * g * (2 * ex.K[j] + eta);
      CHECK(std::abs(dlz - rhs) <= 1e-4 * std::abs(rhs));
    }
  }
}

TEST_CASE("complexity algebra closure") {
  SUBCASE("closed-form family recovers its parameters") {
    const double al = 4.0, ga = 202.0;
    const int L = 200;
    RVec b(L - 1);
    for (int n = 1; n < L; ++n) b[n - 1] = std::sqrt(0.25 * al * n * (n - 1) + 0.5 * ga * n);
    auto rep = algebra_check(ChainSpec::closed(b));
    CHECK(rep.comKM_error <= 1e-13);
    CHECK(rep.comKL_error <= 1e-13);
    CHECK(rep.closes);
    CHECK(rep.residual <= 1e-9);
    CHECK(rep.alpha == doctest::Approx(al).epsilon(1e-9));
    CHECK(rep.gamma == doctest::Approx(ga).epsilon(1e-9));
    CHECK(rep.bkl_error <= 1e-9);
  }
  SUBCASE("generic sublinear chain does not close") {
    const int L = 100;
    RVec b(L - 1);
    for (int n = 1; n < L; ++n) b[n - 1] = std::pow(n, 0.7);
    auto rep = algebra_check(ChainSpec::closed(b));
    CHECK(!rep.closes);
    CHECK(rep.residual > 1e-4);
  }
  SUBCASE("su2 termination relation") {
    const double j = 12;
    auto o = oracle(OracleSpec::su2(1.0, j));
    auto rep = algebra_check(oracle_chain(o, o.krylov_dim));
    CHECK(rep.closes);
    const int dk = o.krylov_dim;
    CHECK(rep.alpha == doctest::Approx(-2 * rep.gamma / (dk - 1)).epsilon(1e-8));
  }
}

TEST_CASE("dispersion bound") {
  SUBCASE("saturated on a closure chain") {
    auto o = oracle(OracleSpec::sl2r(1.0, 1.0));
    RVec t = RVec::LinSpaced(401, 0.0, 2.0);
    auto tr = complexity_trace(propagate(oracle_chain(o, 900), t), false);
    auto rep = dispersion_bound_check(tr, o.b(1));
    CHECK(rep.holds);
    // ratio 1 wherever the denominator is resolved (skip t ~ 0)
    for (int j = 40; j < t.size(); ++j)
      CHECK(std::abs(rep.ratio[j] - 1.0) <= 1e-6);
  }
  SUBCASE("strict inequality away from closure") {
    // GOE Liouvillian chain from an actual Lanczos run
    RmtSpec rs;
    rs.ensemble = Ensemble::GOE;
    rs.n = 24;
    rs.sigma = 1.0 / std::sqrt(24.0);
    rs.seed = 4;
    const Mat h = rmt_sample(rs);
    auto L = build_liouvillian(h);
    InnerProduct ip(InnerProductSpec::infinite_temperature());
    Mat seed = random_hermitian(24, 5);
    seed -= (seed.trace() / 24.0) * Mat::Identity(24, 24);
    seed /= ip.norm(seed);
    LanczosOptions opt;
    opt.max_n = 60;
    auto lan = lanczos_operator(L, seed, ip, opt);
    const int len = lan.terminated ? lan.krylov_dim : static_cast<int>(lan.a.size());
    RVec b = lan.b.head(len - 1);
    RVec t = RVec::LinSpaced(801, 0.0, 4.0);
    auto tr = complexity_trace(propagate(ChainSpec::closed(b), t), false);
    auto rep = dispersion_bound_check(tr, b[0]);
    CHECK(rep.holds);
    double late_max = 0;
    for (int j = t.size() / 2; j < t.size(); ++j) late_max = std::max(late_max, rep.ratio[j]);
    CHECK(late_max < 1.0);
  }
  SUBCASE("short-time expansion on a random chain") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    RVec b(11);
    for (int i = 0; i < 11; ++i) b[i] = u(rng);
    auto chain = ChainSpec::closed(b);
    // K(t) = b1^2 t^2 + (1/6) b1^2 (b2^2 - 2 b1^2) t^4 + O(t^6)
    RVec ts(5);
    RVec resid(5);
    for (int k = 0; k < 5; ++k) ts[k] = 0.02 * std::pow(2.0, k);
    for (int k = 0; k < 5; ++k) {
      RVec grid(2);
      grid << 0.0, ts[k];
      auto wf = propagate(chain, grid);
      auto tr = complexity_trace(wf, false);
      const double t2 = ts[k] * ts[k];
      const double model =
          b[0] * b[0] * t2 + b[0] * b[0] * (b[1] * b[1] - 2 * b[0] * b[0]) * t2 * t2 / 6.0;
      resid[k] = std::abs(tr.K[1] - model);
    }
    auto fit = test::fit_line(ts.array().log().matrix(), resid.array().log().matrix());
    CHECK(fit.first >= 5.5);
  }
  SUBCASE("ehrenfest relation for closure chains") {
    const double al = 1.21, ga = 3.4;
    const int L = 420;
    RVec b(L - 1);
    for (int n = 1; n < L; ++n) b[n - 1] = std::sqrt(0.25 * al * n * (n - 1) + 0.5 * ga * n);
    RVec t = RVec::LinSpaced(1601, 0.0, 4.0);
    auto tr = complexity_trace(propagate(ChainSpec::closed(b), t), false);
    const double h = t[1] - t[0];
    for (int j = 2; j + 2 < t.size(); j += 37) {
      const double d2 = (-tr.K[j + 2] + 16 * tr.K[j + 1] - 30 * tr.K[j] + 16 * tr.K[j - 1] -
                         tr.K[j - 2]) /
                        (12 * h * h);
      const double rhs = al * tr.K[j] + ga;
      CHECK(std::abs(d2 - rhs) <= 1e-5 * std::abs(rhs));
    }
  }
}

TEST_CASE("late-time plateau of a fully exhausted SYK chain") {
  SykSpec spec;
  spec.n_majorana = 10;
  spec.q = 4;
  spec.coupling = 1.0 / std::sqrt(2.0);
  spec.seed = 12;
  const Mat H = syk_hamiltonian(spec);
  auto L = build_liouvillian(H);
  InnerProduct ip(InnerProductSpec::infinite_temperature());
  const Mat seed = std::sqrt(2.0) * majorana_strings(10)[0].to_dense();
  LanczosOptions opt;
  opt.max_n = 1100;
  auto lan = lanczos_operator(L, seed, ip, opt);
  REQUIRE(lan.terminated);
  const int dk = lan.krylov_dim;
  RVec b = lan.b.head(dk - 1);

  // diagonal-ensemble time average from the chain eigenvectors
  RMat T = RMat::Zero(dk, dk);
  for (int i = 0; i + 1 < dk; ++i) T(i, i + 1) = T(i + 1, i) = b[i];
  Eigen::SelfAdjointEigenSolver<RMat> es(T);
  const RMat& V = es.eigenvectors();
  RVec avg = RVec::Zero(dk);
  for (int n = 0; n < dk; ++n)
    for (int k = 0; k < dk; ++k)
      avg[n] += V(0, k) * V(0, k) * V(n, k) * V(n, k);
  double kbar = 0;
  for (int n = 0; n < dk; ++n) kbar += n * avg[n];
  CHECK(std::abs(kbar - dk / 2.0) <= 0.1 * dk / 2.0);
  // bulk sites are uniformly occupied on time average
  std::vector<double> bulk;
  for (int n = dk / 4; n < 3 * dk / 4; ++n) bulk.push_back(avg[n] * dk);
  std::sort(bulk.begin(), bulk.end());
  CHECK(std::abs(bulk[bulk.size() / 2] - 1.0) <= 0.1);
}

TEST_CASE("counterdiabatic coefficients") {
  RVec b(4);
  b << 1, 2, 3, 4;
  auto cd = cd_coefficients(b, 4, 1.0);
  REQUIRE(cd.alpha.size() == 2);
  CHECK(cd.alpha[0] == doctest::Approx(-1.0));
  CHECK(cd.alpha[1] == doctest::Approx(2.0 / 3.0));
  CHECK(cd.cost == doctest::Approx(1 + 4.0 / 9.0));

  RVec b1(1);
  b1 << 1;
  auto cd1 = cd_coefficients(b1, 2, 1.0);
  REQUIRE(cd1.alpha.size() == 1);
  CHECK(cd1.alpha[0] == doctest::Approx(-1.0));

  // homogeneity: b -> c b scales alpha -> alpha / c
  const double c = 2.5;
  auto cds = cd_coefficients(RVec(c * b), 4, 1.0);
  for (int k = 0; k < 2; ++k) CHECK(cds.alpha[k] == doctest::Approx(cd.alpha[k] / c));
  CHECK(cds.cost == doctest::Approx(cd.cost / (c * c)));

  CHECK_THROWS_AS(cd_coefficients(b, 5, 1.0), DomainError);
}
