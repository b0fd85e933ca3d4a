#pragma once

#include "krylov/types.hpp"

namespace krylov {

// Centered moving average of order k (k = 1 is the identity). Even orders use
// the classic half-weight endpoints. Ends are averaged over the available
// window only, so the output has the input length.
RVec moving_average(const RVec& series, int k);

struct FitResult {
  double slope = 0;
  double intercept = 0;
  double stderr_slope = 0;
};

FitResult linear_fit(const RVec& x, const RVec& y);
FitResult loglog_fit(const RVec& x, const RVec& y);  // fit log y ~ slope log x

// Var(log(b_n / b_{n+1})) over [first, last).
double log_variance(const RVec& b, int first, int last);

}  // namespace krylov
