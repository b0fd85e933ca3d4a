#pragma once

#include <optional>

#include "krylov/extprec.hpp"
#include "krylov/series.hpp"
#include "krylov/types.hpp"

namespace krylov {

enum class MomentKind { Operator, State };

// Generator moments: m_n = (O|L^n|O) for operators, <K_0|H^n|K_0> for states.
struct MomentSequence {
  std::vector<cxd> m;
  MomentKind kind = MomentKind::Operator;
  Flags flags;
  std::vector<std::string> decimal;  // set by the extended-precision route
};

struct AutocorrSpec {
  std::vector<cxd> taylor;                           // C(t) = sum taylor[k] t^k
  RVec sample_t;                                     // uniform grid route
  Vec sample_c;
  std::optional<series::AcParams<double>> family;    // closed-form route

  static AutocorrSpec from_taylor(std::vector<cxd> coeffs);
  static AutocorrSpec from_samples(RVec t, Vec c);
  static AutocorrSpec closed_form(series::AcParams<double> fam);
  bool has_closed_form() const { return family.has_value(); }
};

MomentSequence moments_from_autocorr(const AutocorrSpec& ac, int n_max, MomentKind kind);

// Extended-precision moments; requires the closed-form route.
std::vector<Cx<mpreal>> moments_from_autocorr_ext(const AutocorrSpec& ac, int n_max,
                                                  MomentKind kind, unsigned digits10);

struct MomentToLanczosResult {
  Vec a;         // complex diagonal coefficients
  Vec b_complex; // off-diagonal, principal-branch sqrt
  RVec b;        // |b|
  int valid_n = 0;  // number of trustworthy b entries
  Flags flags;
};

MomentToLanczosResult lanczos_from_moments(const std::vector<cxd>& m);
MomentToLanczosResult lanczos_from_moments_ext(const std::vector<Cx<mpreal>>& m,
                                               unsigned digits10);
// Exact-rational recursion for rational (real) moment tables; square roots are
// taken at the end in double precision.
MomentToLanczosResult lanczos_from_moments_exact(const std::vector<BigRat>& m);

// (O_j | L^n | O_k) via powers of the tridiagonal matrix.
cxd tridiagonal_moment(const Vec& a, const RVec& b, int n, int j = 0, int k = 0);
std::vector<cxd> moments_from_lanczos(const Vec& a, const RVec& b, int n_max, int j = 0,
                                      int k = 0);
// Same quantity as an explicit weighted Motzkin-path sum (cross-check route).
cxd motzkin_moment(const Vec& a, const RVec& b, int n, int j = 0, int k = 0);

// Continued-fraction Green's function at z, truncated at the given depth.
cxd greens_function_cf(const Vec& a, const RVec& b, cxd z, int depth);

struct TodaResult {
  Vec a;   // a_n(tau0)
  RVec b;  // b_n(tau0), n = 1..
  double hirota_residual = 0;  // max |tau tau'' - tau'^2 - tau_+ tau_-| / tau^2
  Flags flags;
};

// Hankel-determinant route on the Euclidean autocorrelation; derivative table
// from the closed-form series (or the Taylor route) evaluated at tau0 with
// the requested number of digits.
TodaResult toda_lanczos(const AutocorrSpec& ac_euclidean, int n_max, double tau0,
                        unsigned digits10);

struct SpectralFunctionResult {
  RVec omega;
  Vec phi;  // complex in general; real and even for even real C
  bool windowed = false;
  Flags flags;
};

SpectralFunctionResult spectral_function(const RVec& t, const Vec& c, const RVec& omega);

// Bell numbers B_0..B_n (exact integers) and the mock moment sequence
// m_{2k} = B_{2k} of the periodic mock autocorrelation.
std::vector<BigInt> bell_numbers(int n);
std::vector<BigRat> mock_autocorr_moments(int n_max);

}  // namespace krylov
