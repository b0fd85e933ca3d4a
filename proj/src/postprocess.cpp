#include "krylov/postprocess.hpp"

#include <cmath>

namespace krylov {

RVec moving_average(const RVec& series, int k) {
  if (k < 1) throw DomainError("moving_average: order >= 1 required");
  const Eigen::Index n = series.size();
  if (k == 1) return series;
  RVec out(n);
  const bool even = k % 2 == 0;
  const int half = k / 2;
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0, wsum = 0;
    for (int o = -half; o <= half; ++o) {
      const Eigen::Index j = i + o;
      if (j < 0 || j >= n) continue;
      double w = 1.0;
      if (even && (o == -half || o == half)) w = 0.5;
      if (!even && std::abs(o) > half) continue;
      acc += w * series[j];
      wsum += w;
    }
    out[i] = acc / wsum;
  }
  return out;
}

FitResult linear_fit(const RVec& x, const RVec& y) {
  if (x.size() != y.size() || x.size() < 3) throw DimensionError("linear_fit: bad window");
  const double n = static_cast<double>(x.size());
  const double sx = x.sum(), sy = y.sum(), sxx = x.dot(x), sxy = x.dot(y);
  const double det = n * sxx - sx * sx;
  FitResult r;
  r.slope = (n * sxy - sx * sy) / det;
  r.intercept = (sxx * sy - sx * sxy) / det;
  double ss = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double e = y[i] - (r.slope * x[i] + r.intercept);
    ss += e * e;
  }
  const double sigma2 = ss / (n - 2);
  r.stderr_slope = std::sqrt(sigma2 * n / det);
  return r;
}

FitResult loglog_fit(const RVec& x, const RVec& y) {
  RVec lx(x.size()), ly(y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] <= 0 || y[i] <= 0) throw DomainError("loglog_fit: positive data required");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return linear_fit(lx, ly);
}

double log_variance(const RVec& b, int first, int last) {
  if (first < 0 || last > static_cast<int>(b.size()) || last - first < 3)
    throw DimensionError("log_variance: bad window");
  double mean = 0;
  int cnt = 0;
  std::vector<double> vals;
  for (int n = first; n + 1 < last; ++n) {
    if (b[n] <= 0 || b[n + 1] <= 0) continue;
    vals.push_back(std::log(b[n] / b[n + 1]));
    mean += vals.back();
    ++cnt;
  }
  if (cnt < 2) throw DomainError("log_variance: too few valid ratios");
  mean /= cnt;
  double var = 0;
  for (double v : vals) var += (v - mean) * (v - mean);
  return var / cnt;
}

}  // namespace krylov
