#include "krylov/opspace.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>

#include "krylov/parallel.hpp"

namespace krylov {

Vec vectorize(const Mat& A, NormConvention conv) {
  require_finite(A, "vectorize");
  const Eigen::Index d = A.rows();
  if (A.cols() != d) throw DimensionError("vectorize: square matrix required");
  Vec v(d * d);
  for (Eigen::Index i = 0; i < d; ++i) v.segment(i * d, d) = A.row(i).transpose();
  if (conv == NormConvention::DividedBySqrtTraceIdentity) v /= std::sqrt(double(d));
  return v;
}

Mat devectorize(const Vec& v, NormConvention conv) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
  if (d * d != v.size()) throw DimensionError("devectorize: length is not a square");
  Mat A(d, d);
  for (Eigen::Index i = 0; i < d; ++i) A.row(i) = v.segment(i * d, d).transpose();
  if (conv == NormConvention::DividedBySqrtTraceIdentity) A *= std::sqrt(double(d));
  return A;
}

InnerProductSpec InnerProductSpec::wightman(double beta) {
  if (beta < 0) throw DomainError("wightman: beta >= 0 required");
  InnerProductSpec s;
  s.kind = Kind::Wightman;
  s.beta = beta;
  return s;
}

InnerProductSpec InnerProductSpec::standard(double beta) {
  if (beta < 0) throw DomainError("standard: beta >= 0 required");
  InnerProductSpec s;
  s.kind = Kind::Standard;
  s.beta = beta;
  return s;
}

InnerProductSpec InnerProductSpec::g_weighted(double beta, GWeight gw) {
  if (beta < 0) throw DomainError("g_weighted: beta >= 0 required");
  if (gw.lambda.size() != gw.g.size() || gw.lambda.size() < 2)
    throw DimensionError("g_weighted: need matching lambda/g samples");
  double avg = 0;
  for (Eigen::Index i = 0; i + 1 < gw.lambda.size(); ++i) {
    if (gw.g[i] < 0) throw DomainError("g_weighted: g must be non-negative");
    avg += 0.5 * (gw.g[i] + gw.g[i + 1]) * (gw.lambda[i + 1] - gw.lambda[i]);
  }
  avg /= beta > 0 ? beta : 1.0;
  if (std::abs(avg - 1.0) > 1e-6) throw DomainError("g_weighted: g must average to 1");
  for (Eigen::Index i = 0; i < gw.lambda.size(); ++i) {
    // symmetry under lambda <-> beta - lambda (sampled check)
    const double lr = beta - gw.lambda[i];
    double gr = 0;
    bool found = false;
    for (Eigen::Index j = 0; j < gw.lambda.size(); ++j)
      if (std::abs(gw.lambda[j] - lr) < 1e-9 * std::max(1.0, beta)) {
        gr = gw.g[j];
        found = true;
        break;
      }
    if (found && std::abs(gr - gw.g[i]) > 1e-8 * (1.0 + std::abs(gw.g[i])))
      throw DomainError("g_weighted: g must be symmetric about beta/2");
  }
  InnerProductSpec s;
  s.kind = Kind::GWeighted;
  s.beta = beta;
  s.gw = std::move(gw);
  return s;
}

InnerProduct::InnerProduct(InnerProductSpec spec, const Mat* H) : spec_(std::move(spec)) {
  if (!spec_.thermal()) return;
  if (!H) throw DomainError("thermal inner product requires H");
  if (!approx_hermitian(*H)) throw DomainError("thermal inner product requires Hermitian H");
  dim_ = static_cast<int>(H->rows());
  Eigen::SelfAdjointEigenSolver<Mat> es(*H);
  E_ = es.eigenvalues();
  V_ = es.eigenvectors();
  const int d = dim_;
  w_.resize(Eigen::Index(d) * d);
  // Weights relative to the ground state keep exp() in range for any beta.
  const double e0 = E_.minCoeff();
  RVec boltz(d);
  for (int n = 0; n < d; ++n) boltz[n] = std::exp(-spec_.beta * (E_[n] - e0));
  const double z = boltz.sum();
  const double beta = spec_.beta;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      double w = 0;
      switch (spec_.kind) {
        case InnerProductSpec::Kind::Wightman:
          w = std::exp(-0.5 * beta * (E_[m] - e0) - 0.5 * beta * (E_[n] - e0)) / z;
          break;
        case InnerProductSpec::Kind::Standard:
          w = 0.5 * (boltz[m] + boltz[n]) / z;
          break;
        case InnerProductSpec::Kind::GWeighted: {
          // (1/beta) int g(l) exp(-(beta-l)Em - l En) dl, trapezoid on samples
          const auto& L = spec_.gw.lambda;
          const auto& g = spec_.gw.g;
          double acc = 0;
          for (Eigen::Index i = 0; i + 1 < L.size(); ++i) {
            auto f = [&](double l, double gl) {
              return gl * std::exp(-(beta - l) * (E_[m] - e0) - l * (E_[n] - e0));
            };
            acc += 0.5 * (f(L[i], g[i]) + f(L[i + 1], g[i + 1])) * (L[i + 1] - L[i]);
          }
          w = acc / (beta > 0 ? beta : 1.0) / z;
          break;
        }
        default:
          break;
      }
      w_[Eigen::Index(m) * d + n] = w;
    }
}

cxd InnerProduct::dot(const Mat& A, const Mat& B) const {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw DimensionError("inner product: dimension mismatch");
  if (!spec_.thermal()) {
    const double d = static_cast<double>(A.rows());
    return (A.adjoint() * B).trace() / d;
  }
  if (A.rows() != dim_) throw DimensionError("inner product: dimension mismatch with H");
  const Mat Ae = to_eigenbasis(A);
  const Mat Be = to_eigenbasis(B);
  cxd acc = 0;
  const int d = dim_;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      acc += w_[Eigen::Index(m) * d + n] * std::conj(Ae(m, n)) * Be(m, n);
  return acc;
}

double InnerProduct::norm(const Mat& A) const { return std::sqrt(std::abs(dot(A, A).real())); }

Mat PauliStringOp::to_dense() const {
  const int d = dim();
  Mat M = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j) M(perm[j], j) = phase[j];
  return M;
}

void PauliStringOp::apply_left(const Mat& X, Mat& out) const {
  const int d = dim();
  out.resize(d, d);
  for (int j = 0; j < d; ++j) out.row(perm[j]) = phase[j] * X.row(j);
}

void PauliStringOp::apply_right(const Mat& X, Mat& out) const {
  const int d = dim();
  out.resize(d, d);
  for (int j = 0; j < d; ++j) out.col(j) = phase[j] * X.col(perm[j]);
}

PauliStringOp PauliStringOp::adjoint() const {
  const int d = dim();
  PauliStringOp r;
  r.perm.resize(d);
  r.phase.resize(d);
  for (int j = 0; j < d; ++j) {
    r.perm[perm[j]] = j;
    r.phase[perm[j]] = std::conj(phase[j]);
  }
  return r;
}

PauliStringOp PauliStringOp::scaled(cxd c) const {
  PauliStringOp r = *this;
  r.phase *= c;
  return r;
}

PauliStringOp PauliStringOp::compose(const PauliStringOp& a, const PauliStringOp& b) {
  const int d = a.dim();
  if (b.dim() != d) throw DimensionError("PauliStringOp::compose: dimension mismatch");
  PauliStringOp r;
  r.perm.resize(d);
  r.phase.resize(d);
  for (int j = 0; j < d; ++j) {
    r.perm[j] = a.perm[b.perm[j]];
    r.phase[j] = a.phase[b.perm[j]] * b.phase[j];
  }
  return r;
}

PauliStringOp PauliStringOp::identity(int d) {
  PauliStringOp r;
  r.perm = Eigen::VectorXi::LinSpaced(d, 0, d - 1);
  r.phase = Vec::Ones(d);
  return r;
}

Mat Jump::dense() const {
  if (std::holds_alternative<Mat>(op)) return std::get<Mat>(op);
  return std::get<PauliStringOp>(op).to_dense();
}

int Jump::dim() const {
  if (std::holds_alternative<Mat>(op)) return static_cast<int>(std::get<Mat>(op).rows());
  return std::get<PauliStringOp>(op).dim();
}

SuperOperator build_liouvillian(const Mat& H) {
  require_finite(H, "build_liouvillian");
  if (!approx_hermitian(H)) throw DomainError("build_liouvillian: H must be Hermitian");
  SuperOperator s;
  s.dim_ = static_cast<int>(H.rows());
  s.kind_ = SuperOperator::Kind::Liouvillian;
  s.H_ = 0.5 * (H + H.adjoint());
  return s;
}

SuperOperator build_adjoint_lindbladian(const Mat& H, std::vector<Jump> jumps, int sign) {
  require_finite(H, "build_adjoint_lindbladian");
  if (!approx_hermitian(H)) throw DomainError("build_adjoint_lindbladian: H must be Hermitian");
  if (sign != +1 && sign != -1) throw DomainError("sign must be +1 or -1");
  SuperOperator s;
  s.dim_ = static_cast<int>(H.rows());
  s.kind_ = SuperOperator::Kind::AdjointLindbladian;
  s.sign_ = sign;
  s.H_ = 0.5 * (H + H.adjoint());
  s.ldag_l_sum_ = Mat::Zero(s.dim_, s.dim_);
  for (auto& j : jumps) {
    if (j.rate < 0) throw DomainError("jump rate must be non-negative");
    if (j.dim() != s.dim_) throw DimensionError("jump dimension mismatch");
    const Mat L = j.dense();
    s.ldag_l_sum_.noalias() += j.rate * (L.adjoint() * L);
  }
  s.jumps_ = std::move(jumps);
  return s;
}

Mat SuperOperator::apply_hamiltonian_part(const Mat& O) const {
  Mat out;
  par::commutator(H_, O, out);
  return out;
}

Mat SuperOperator::apply_dissipative_part(const Mat& O) const {
  Mat acc = Mat::Zero(dim_, dim_);
  if (kind_ == Kind::Liouvillian) return acc;
  const double s = static_cast<double>(sign_);
  Mat tmp1, tmp2;
  for (const auto& j : jumps_) {
    if (j.rate == 0) continue;
    if (std::holds_alternative<PauliStringOp>(j.op)) {
      const auto& P = std::get<PauliStringOp>(j.op);
      const auto Pd = P.adjoint();
      Pd.apply_left(O, tmp1);   // L^dag O
      P.apply_right(tmp1, tmp2);  // L^dag O L
      acc.noalias() += (s * j.rate) * tmp2;
    } else {
      const Mat& L = std::get<Mat>(j.op);
      par::sandwich_add(s * j.rate, L.adjoint(), O, L, acc);
    }
  }
  acc.noalias() -= 0.5 * (ldag_l_sum_ * O + O * ldag_l_sum_);
  return cxd(0, -1) * acc;
}

Mat SuperOperator::apply(const Mat& O) const {
  if (O.rows() != dim_ || O.cols() != dim_) throw DimensionError("SuperOperator::apply");
  Mat out = apply_hamiltonian_part(O);
  if (kind_ == Kind::AdjointLindbladian) out += apply_dissipative_part(O);
  return out;
}

Mat SuperOperator::apply_adjoint(const Mat& O) const {
  if (kind_ == Kind::Liouvillian) return apply(O);
  // Adjoint of each term A (.) B is A^dag (.) B^dag; -i factors conjugate.
  Mat out;
  par::commutator(H_, O, out);
  Mat acc = Mat::Zero(dim_, dim_);
  const double s = static_cast<double>(sign_);
  Mat tmp1, tmp2;
  for (const auto& j : jumps_) {
    if (j.rate == 0) continue;
    if (std::holds_alternative<PauliStringOp>(j.op)) {
      const auto& P = std::get<PauliStringOp>(j.op);
      const auto Pd = P.adjoint();
      P.apply_left(O, tmp1);    // L O
      Pd.apply_right(tmp1, tmp2);  // L O L^dag
      acc.noalias() += (s * j.rate) * tmp2;
    } else {
      const Mat& L = std::get<Mat>(j.op);
      par::sandwich_add(s * j.rate, L, O, L.adjoint(), acc);
    }
  }
  acc.noalias() -= 0.5 * (ldag_l_sum_ * O + O * ldag_l_sum_);
  out += cxd(0, 1) * acc;
  return out;
}

Vec SuperOperator::apply_vec(const Vec& v) const { return vectorize(apply(devectorize(v))); }

Vec SuperOperator::apply_adjoint_vec(const Vec& v) const {
  return vectorize(apply_adjoint(devectorize(v)));
}

Mat SuperOperator::materialize(int max_dim) const {
  if (dim_ > max_dim)
    throw ResourceGuardError("materialize: dimension above cap; raise max_dim explicitly");
  const Eigen::Index D = Eigen::Index(dim_) * dim_;
  Mat M(D, D);
  Mat basis = Mat::Zero(dim_, dim_);
  for (Eigen::Index c = 0; c < D; ++c) {
    basis(c / dim_, c % dim_) = 1.0;
    M.col(c) = vectorize(apply(basis));
    basis(c / dim_, c % dim_) = 0.0;
  }
  return M;
}

std::vector<PauliStringOp> majorana_strings(int n_majorana) {
  const int N = n_majorana;
  if (N % 2 != 0 || N <= 0) throw DomainError("majorana_strings: N must be positive even");
  const int m = N / 2;
  const int d = 1 << m;
  std::vector<PauliStringOp> majo;
  majo.reserve(N);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  // psi_{2k+1} = (prod_{l<k} sz_l) sx_k / sqrt(2), psi_{2k+2}: sx -> sy
  for (int a = 0; a < N; ++a) {
    const int site = a / 2;
    const bool is_y = (a % 2) != 0;
    const int zmask = (1 << site) - 1;
    PauliStringOp P;
    P.perm.resize(d);
    P.phase.resize(d);
    for (int b = 0; b < d; ++b) {
      P.perm[b] = b ^ (1 << site);
      const double zsign = (std::popcount(unsigned(b) & unsigned(zmask)) % 2 == 0) ? 1.0 : -1.0;
      cxd ph = zsign * inv_sqrt2;
      if (is_y) ph *= ((b >> site) & 1) ? cxd(0, -1) : cxd(0, 1);
      P.phase[b] = ph;
    }
    majo.push_back(std::move(P));
  }
  return majo;
}

RVec operator_size_distribution(const Mat& A, int n_majorana) {
  const int N = n_majorana;
  if (N % 2 != 0) throw DomainError("operator_size_distribution: N must be even");
  if (N > 14) throw ResourceGuardError("operator_size_distribution: N > 14 unsupported");
  const int d = 1 << (N / 2);
  if (A.rows() != d || A.cols() != d)
    throw DimensionError("operator_size_distribution: dim must be 2^(N/2)");

  const auto majo = majorana_strings(N);
  RVec hist = RVec::Zero(N + 1);
  const long nsub = 1L << N;
  // Strings indexed by subset mask, built incrementally from the lowest set
  // bit. Normalized strings are 2^(s/2) psi_{i1}...psi_{is}.
  std::vector<PauliStringOp> cache(nsub);
  cache[0] = PauliStringOp::identity(d);
  for (long mask = 0; mask < nsub; ++mask) {
    if (mask > 0) {
      const int lowest = std::countr_zero(static_cast<unsigned long>(mask));
      cache[mask] = PauliStringOp::compose(majo[lowest], cache[mask & (mask - 1)]);
    }
    const int s = std::popcount(static_cast<unsigned long>(mask));
    const auto& P = cache[mask];
    cxd tr = 0;  // Tr(P^dag A) = sum_j conj(phase_j) A(perm_j, j)
    for (int j = 0; j < d; ++j) tr += std::conj(P.phase[j]) * A(P.perm[j], j);
    const cxd coeff = std::pow(2.0, 0.5 * s) * tr / static_cast<double>(d);
    hist[s] += std::norm(coeff);
  }
  return hist;
}

}  // namespace krylov
