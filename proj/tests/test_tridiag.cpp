#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "krylov/models.hpp"
#include "krylov/tridiag.hpp"
#include "test_util.hpp"

using namespace krylov;
using namespace krylov::test;

namespace {
DotFn scaled_dot(int d) {
  const double dd = d;
  return [dd](const Vec& u, const Vec& v) { return u.dot(v) / dd; };
}
}  // namespace

TEST_CASE("operator lanczos: single-gap qubit chain") {
  auto L = build_liouvillian(sigma_z());
  InnerProduct ip(InnerProductSpec::infinite_temperature());
  LanczosOptions opt;
  opt.max_n = 10;
  auto res = lanczos_operator(L, sigma_x(), ip, opt);
  REQUIRE(res.terminated);
  CHECK(res.krylov_dim == 2);
  REQUIRE(res.b.size() == 1);
  CHECK(res.b[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(res.a.cwiseAbs().maxCoeff() < 1e-12);

  // conserved seed
  auto res2 = lanczos_operator(L, sigma_z(), ip, opt);
  CHECK(res2.krylov_dim == 1);
  CHECK(res2.flags.has("commutes"));
}

TEST_CASE("su2 ladder generator reproduces the closed-form coefficients") {
  const double j = 3;
  const Mat G = su2_ladder_generator(j, 1.0);
  Vec seed = Vec::Zero(7);
  seed[0] = 1;
  LanczosOptions opt;
  opt.max_n = 20;
  auto res = lanczos_matrix(G, seed, opt);
  REQUIRE(res.terminated);
  CHECK(res.krylov_dim == 7);
  REQUIRE(res.b.size() == 6);
  for (int n = 1; n <= 6; ++n)
    CHECK(res.b[n - 1] == doctest::Approx(std::sqrt(n * (7.0 - n))).epsilon(1e-10));
}

TEST_CASE("monic version matches the orthonormal coefficients") {
  InnerProduct ip(InnerProductSpec::infinite_temperature());
  const Mat h = random_hermitian(6, 42);
  auto L = build_liouvillian(h);
  Mat seed = random_hermitian(6, 43);
  seed /= ip.norm(seed);

  LanczosOptions opt;
  opt.max_n = 12;
  auto ortho = lanczos_operator(L, seed, ip, opt);
  auto monic = lanczos_monic(L, seed, ip, opt);
  const int n = std::min<int>(ortho.b.size(), monic.delta.size());
  REQUIRE(n >= 8);
  for (int i = 0; i < n; ++i)
    CHECK(std::sqrt(monic.delta[i]) == doctest::Approx(ortho.b[i]).epsilon(1e-8));

  // Delta_1 = b_1^2 = (seed | L^2 | seed), the second moment
  const Mat l2 = L.apply(L.apply(seed));
  CHECK(monic.delta[0] == doctest::Approx(ip.dot(seed, l2).real()).epsilon(1e-10));
}

TEST_CASE("state lanczos: two-level example and eigenstate flag") {
  StateLanczosOptions opt;
  opt.max_n = 8;
  Vec psi0 = Vec::Zero(2);
  psi0[0] = 1;
  auto res = lanczos_state(sigma_x(), psi0, opt);
  REQUIRE(res.terminated);
  CHECK(res.krylov_dim == 2);
  CHECK(res.a.size() == 2);
  CHECK(std::abs(res.a[0]) < 1e-14);
  CHECK(std::abs(res.a[1]) < 1e-14);
  REQUIRE(res.b.size() == 1);
  CHECK(res.b[0] == doctest::Approx(1.0).epsilon(1e-12));

  // eigenstate seed
  Vec plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  auto res2 = lanczos_state(sigma_x(), plus, opt);
  CHECK(res2.krylov_dim == 1);
  CHECK(res2.flags.has("eigenstate"));
}

TEST_CASE("hermitian seed at infinite temperature has vanishing a_n") {
  const Mat h = random_hermitian(8, 51);
  auto L = build_liouvillian(h);
  InnerProduct ip(InnerProductSpec::infinite_temperature());
  Mat seed = random_hermitian(8, 52);
  seed /= ip.norm(seed);
  LanczosOptions opt;
  opt.max_n = 30;
  auto res = lanczos_operator(L, seed, ip, opt);
  REQUIRE(res.b.size() >= 10);
  CHECK(res.a.cwiseAbs().maxCoeff() <= 1e-9 * res.b.maxCoeff());
}

TEST_CASE("full re-orthogonalization controls the Gram defect") {
  // GUE Liouvillian where plain recursion visibly loses orthogonality
  RmtSpec rs;
  rs.ensemble = Ensemble::GUE;
  rs.n = 32;
  rs.sigma = 1.0 / std::sqrt(32.0);
  rs.seed = 7;
  const Mat h = rmt_sample(rs);
  auto L = build_liouvillian(h);
  InnerProduct ip(InnerProductSpec::infinite_temperature());
  Mat seed = random_hermitian(32, 8);
  seed -= (seed.trace() / 32.0) * Mat::Identity(32, 32);
  seed /= ip.norm(seed);

  LanczosOptions opt;
  opt.max_n = 200;
  opt.store_basis = true;
  opt.reortho = Reortho::Full;
  auto full = lanczos_operator(L, seed, ip, opt);
  auto dot = scaled_dot(32);
  CHECK(full.gram_defect(dot) <= 1e-8);

  opt.reortho = Reortho::None;
  auto none = lanczos_operator(L, seed, ip, opt);
  CHECK(none.gram_defect(dot) > 1e-4);
}

TEST_CASE("krylov dimension bound saturates for a small SYK sample") {
  SykSpec spec;
  spec.n_majorana = 10;
  spec.q = 4;
  spec.coupling = 1.0 / std::sqrt(2.0);
  spec.seed = 3;
  const Mat H = syk_hamiltonian(spec);
  CHECK(approx_hermitian(H));
  auto L = build_liouvillian(H);
  InnerProduct ip(InnerProductSpec::infinite_temperature());
  const Mat seed = std::sqrt(2.0) * majorana_strings(10)[0].to_dense();
  LanczosOptions opt;
  opt.max_n = 1100;
  auto res = lanczos_operator(L, seed, ip, opt);
  const int d = 32;
  REQUIRE(res.terminated);
  CHECK(res.krylov_dim <= d * d - d + 1);
  CHECK(res.krylov_dim > d);
}

TEST_CASE("arnoldi reduces to lanczos for a Hermitian generator") {
  const Mat h = random_hermitian(6, 61);
  auto L = build_liouvillian(h);
  InnerProduct ip(InnerProductSpec::infinite_temperature());
  Mat seed = random_hermitian(6, 62);
  seed /= ip.norm(seed);
  LanczosOptions opt;
  opt.max_n = 14;
  auto lan = lanczos_operator(L, seed, ip, opt);
  auto arn = arnoldi(L, seed, ip, opt);
  const int n = std::min<int>(lan.b.size(), arn.h.cols() - 1);
  for (int k = 0; k < n; ++k) {
    CHECK(std::abs(arn.h(k + 1, k) - lan.b[k]) < 1e-8 * lan.b[k]);
    CHECK(std::abs(arn.h(k, k)) < 1e-9);
    if (k >= 2)
      for (int m = 0; m < k - 1; ++m) CHECK(std::abs(arn.h(m, k)) < 1e-8);
  }

  // reconstruction residual ||L V_n - sum_m h_mn V_m||
  auto dot = scaled_dot(6);
  for (size_t col = 0; col + 1 < arn.basis.size(); ++col) {
    Vec lhs = L.apply_vec(arn.basis[col]);
    for (size_t m = 0; m < arn.basis.size() && m <= col + 1; ++m)
      lhs -= arn.h(m, col) * arn.basis[m];
    CHECK(std::sqrt(std::abs(dot(lhs, lhs))) < 1e-9);
  }
}

TEST_CASE("bilanczos: closed limit, bi-orthonormality, eigenvalue bound") {
  const int d = 8;
  const Mat h = random_hermitian(d, 71);
  InnerProduct ip(InnerProductSpec::infinite_temperature());
  Mat seed = random_hermitian(d, 72);
  seed -= (seed.trace() / double(d)) * Mat::Identity(d, d);
  seed /= ip.norm(seed);

  SUBCASE("unitary limit equals lanczos coefficientwise") {
    auto L = build_liouvillian(h);
    std::vector<Jump> none;
    auto Lo = build_adjoint_lindbladian(h, none);
    LanczosOptions opt;
    opt.max_n = 20;
    opt.store_basis = true;
    auto lan = lanczos_operator(L, seed, ip, opt);
    auto bil = bilanczos(Lo, seed, ip, opt);
    const int n = std::min<int>(lan.b.size(), bil.b.size());
    REQUIRE(n >= 10);
    for (int k = 0; k < n; ++k) {
      CHECK(std::abs(bil.b[k] - lan.b[k]) <= 1e-9 * lan.b.maxCoeff());
      CHECK(std::abs(bil.c[k] - lan.b[k]) <= 1e-9 * lan.b.maxCoeff());
    }
    CHECK(bil.a.cwiseAbs().maxCoeff() <= 1e-8 * lan.b.maxCoeff());
  }

  SUBCASE("random lindbladian: defect, tridiagonal structure, bound") {
    std::vector<Jump> jumps{Jump{random_matrix(d, 73), 0.4}, Jump{random_matrix(d, 74), 0.25}};
    auto Lo = build_adjoint_lindbladian(h, jumps);
    LanczosOptions opt;
    opt.max_n = 30;
    opt.store_basis = true;
    opt.reortho = Reortho::Full;
    auto bil = bilanczos(Lo, seed, ip, opt);
    auto dot = scaled_dot(d);
    CHECK(bil.biortho_defect(dot) <= 1e-8);

    // three-term recurrences: L p_j = b_j p_{j-1} + a_j p_j + c_{j+1} p_{j+1}
    const int m = static_cast<int>(bil.a.size());
    for (int jj = 0; jj + 1 < m && jj + 1 < static_cast<int>(bil.p_basis.size()); ++jj) {
      Vec lhs = Lo.apply_vec(bil.p_basis[jj]);
      lhs -= bil.a[jj] * bil.p_basis[jj];
      if (jj > 0) lhs -= bil.b_complex[jj - 1] * bil.p_basis[jj - 1];
      lhs -= bil.c[jj] * bil.p_basis[jj + 1];
      CHECK(std::sqrt(std::abs(dot(lhs, lhs))) < 2e-6);
    }

    // spectrum bound of the materialized generator
    Eigen::ComplexEigenSolver<Mat> es(Lo.materialize());
    double lo = 1e300, hi = -1e300;
    for (Eigen::Index i = 0; i < bil.a.size(); ++i) {
      lo = std::min(lo, bil.a[i].imag());
      hi = std::max(hi, bil.a[i].imag());
    }
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const double im = es.eigenvalues()[i].imag();
      CHECK(im >= lo - 1e-7);
      CHECK(im <= hi + 1e-7);
    }
  }
}

TEST_CASE("arnoldi and bilanczos blocks are similar on an exhausted space") {
  const int d = 3;
  const Mat h = random_hermitian(d, 81);
  std::vector<Jump> jumps{Jump{random_matrix(d, 82), 0.3}};
  auto Lo = build_adjoint_lindbladian(h, jumps);
  InnerProduct ip(InnerProductSpec::infinite_temperature());
  Mat seed = random_hermitian(d, 83);
  seed -= (seed.trace() / double(d)) * Mat::Identity(d, d);
  seed /= ip.norm(seed);
  LanczosOptions opt;
  opt.max_n = 40;
  opt.store_basis = true;
  auto arn = arnoldi(Lo, seed, ip, opt);
  auto bil = bilanczos(Lo, seed, ip, opt);
  REQUIRE(arn.terminated);
  REQUIRE(bil.terminated);
  const int k = std::min(arn.krylov_dim, bil.krylov_dim);
  Eigen::ComplexEigenSolver<Mat> ea(arn.square(k));
  Eigen::ComplexEigenSolver<Mat> eb(bil.tridiagonal(k));
  std::vector<cxd> va, vb;
  for (int i = 0; i < k; ++i) {
    va.push_back(ea.eigenvalues()[i]);
    vb.push_back(eb.eigenvalues()[i]);
  }
  auto by_parts = [](const cxd& x, const cxd& y) {
    if (std::abs(x.real() - y.real()) > 1e-8) return x.real() < y.real();
    return x.imag() < y.imag();
  };
  std::sort(va.begin(), va.end(), by_parts);
  std::sort(vb.begin(), vb.end(), by_parts);
  for (int i = 0; i < k; ++i) CHECK(std::abs(va[i] - vb[i]) < 1e-6);
}
