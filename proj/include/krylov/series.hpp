#pragma once

// Truncated Taylor series machinery shared by the oracle library and the
// autocorrelation-based coefficient methods. Everything is templated on the
// scalar field so the same recurrences run in double, multiprecision float
// and exact rational arithmetic.

#include <stdexcept>
#include <vector>

namespace krylov::series {

// c[k] is the coefficient of x^k around the expansion point.
template <class T>
using Coeffs = std::vector<T>;

template <class T>
Coeffs<T> mul(const Coeffs<T>& a, const Coeffs<T>& b, int order) {
  Coeffs<T> r(order + 1, T(0));
  for (int i = 0; i <= order; ++i) {
    if (i >= static_cast<int>(a.size())) break;
    for (int j = 0; j + i <= order; ++j) {
      if (j >= static_cast<int>(b.size())) break;
      r[i + j] += a[i] * b[j];
    }
  }
  return r;
}

// Families of autocorrelation functions with closed-form series generators.
// Each is defined by a first-order ODE system whose Taylor recurrence is
// evaluated term by term.
enum class AcFamily {
  SechPow,      // sech(alpha t)^eta                      params: alpha, eta
  SecPow,       // sec(alpha tau)^eta  (Euclidean)        params: alpha, eta
  Gauss,        // exp(s alpha^2 t^2 / 2)                 params: alpha, sgn s
  CosPow,       // cos(alpha t)^eta                       params: alpha, eta
  LogSech,      // 1 + pref * log sech(alpha t)           params: alpha, pref
  OpenExact,    // sech(g t)^eta / (1 + u tanh(g t))^eta  params: g, u, eta
  ShiftedSech,  // A sech(beta t + c), A = cosh(c)        params: beta, c
  DissSykLog,   // 1 + pref*(log(a^2/J^2) - 2 log cosh(a t + c))
};

template <class T>
struct AcParams {
  AcFamily family = AcFamily::SechPow;
  T alpha = T(1);
  T eta = T(1);
  T u = T(0);
  T shift = T(0);   // c for shifted families
  T pref = T(0);    // prefactor for log families
  T jj = T(1);      // script-J in DissSykLog
  int gauss_sign = -1;
};

// Taylor coefficients of C around t0 up to the requested order. For exact
// rational runs t0 must be 0 (trig seeds are then rational).
template <class T>
Coeffs<T> autocorr_series(const AcParams<T>& p, const T& t0, int order) {
  using std::tanh;  // ADL picks up multiprecision overloads
  using std::cosh;
  using std::log;
  using std::pow;
  using std::tan;
  using std::cos;
  using std::exp;

  const int M = order;
  auto make = [&](int n) { return Coeffs<T>(n, T(0)); };

  switch (p.family) {
    case AcFamily::SechPow: {
      // f' = -eta a g f,  g' = a (1 - g^2), f = sech^eta
      Coeffs<T> f = make(M + 1), g = make(M + 1);
      g[0] = tanh(p.alpha * t0);
      f[0] = pow(T(1) / cosh(p.alpha * t0), p.eta);
      for (int k = 0; k < M; ++k) {
        T g2 = T(0), gf = T(0);
        for (int i = 0; i <= k; ++i) {
          g2 += g[i] * g[k - i];
          gf += g[i] * f[k - i];
        }
        g[k + 1] = p.alpha * ((k == 0 ? T(1) : T(0)) - g2) / T(k + 1);
        f[k + 1] = -p.eta * p.alpha * gf / T(k + 1);
      }
      return f;
    }
    case AcFamily::SecPow: {
      // f' = eta a g f,  g' = a (1 + g^2), f = sec^eta
      Coeffs<T> f = make(M + 1), g = make(M + 1);
      g[0] = tan(p.alpha * t0);
      f[0] = pow(T(1) / cos(p.alpha * t0), p.eta);
      for (int k = 0; k < M; ++k) {
        T g2 = T(0), gf = T(0);
        for (int i = 0; i <= k; ++i) {
          g2 += g[i] * g[k - i];
          gf += g[i] * f[k - i];
        }
        g[k + 1] = p.alpha * ((k == 0 ? T(1) : T(0)) + g2) / T(k + 1);
        f[k + 1] = p.eta * p.alpha * gf / T(k + 1);
      }
      return f;
    }
    case AcFamily::Gauss: {
      // f' = s a^2 (t0 + x) f
      Coeffs<T> f = make(M + 1);
      const T s = T(p.gauss_sign);
      f[0] = exp(s * p.alpha * p.alpha * t0 * t0 / T(2));
      for (int k = 0; k < M; ++k) {
        T rhs = t0 * f[k];
        if (k >= 1) rhs += f[k - 1];
        f[k + 1] = s * p.alpha * p.alpha * rhs / T(k + 1);
      }
      return f;
    }
    case AcFamily::CosPow: {
      // f' = -eta a g f, g = tan: g' = a (1 + g^2)
      Coeffs<T> f = make(M + 1), g = make(M + 1);
      g[0] = tan(p.alpha * t0);
      f[0] = pow(cos(p.alpha * t0), p.eta);
      for (int k = 0; k < M; ++k) {
        T g2 = T(0), gf = T(0);
        for (int i = 0; i <= k; ++i) {
          g2 += g[i] * g[k - i];
          gf += g[i] * f[k - i];
        }
        g[k + 1] = p.alpha * ((k == 0 ? T(1) : T(0)) + g2) / T(k + 1);
        f[k + 1] = -p.eta * p.alpha * gf / T(k + 1);
      }
      return f;
    }
    case AcFamily::LogSech: {
      // f = 1 + pref log sech(a t); f' = -pref a g, g' = a(1 - g^2)
      Coeffs<T> f = make(M + 1), g = make(M + 1);
      g[0] = tanh(p.alpha * t0);
      f[0] = T(1) + p.pref * log(T(1) / cosh(p.alpha * t0));
      for (int k = 0; k < M; ++k) {
        T g2 = T(0);
        for (int i = 0; i <= k; ++i) g2 += g[i] * g[k - i];
        g[k + 1] = p.alpha * ((k == 0 ? T(1) : T(0)) - g2) / T(k + 1);
        f[k + 1] = -p.pref * p.alpha * g[k] / T(k + 1);
      }
      return f;
    }
    case AcFamily::OpenExact: {
      // (1 + u g) f' = -eta a (g + u) f,  g' = a (1 - g^2)
      Coeffs<T> f = make(M + 1), g = make(M + 1);
      g[0] = tanh(p.alpha * t0);
      f[0] = pow(T(1) / cosh(p.alpha * t0), p.eta) / pow(T(1) + p.u * g[0], p.eta);
      for (int k = 0; k < M; ++k) {
        T g2 = T(0);
        for (int i = 0; i <= k; ++i) g2 += g[i] * g[k - i];
        g[k + 1] = p.alpha * ((k == 0 ? T(1) : T(0)) - g2) / T(k + 1);
        // rhs_k = -eta a sum (g + u)_i f_{k-i}; lhs: sum (1 + u g)_i (k+1-i) f_{k+1-i}
        T rhs = T(0);
        for (int i = 0; i <= k; ++i) {
          T gu = g[i] + (i == 0 ? p.u : T(0));
          rhs += gu * f[k - i];
        }
        rhs = -p.eta * p.alpha * rhs;
        T corr = T(0);
        for (int i = 1; i <= k; ++i) corr += p.u * g[i] * T(k + 1 - i) * f[k + 1 - i];
        f[k + 1] = (rhs - corr) / (T(k + 1) * (T(1) + p.u * g[0]));
      }
      return f;
    }
    case AcFamily::ShiftedSech: {
      // f = A sech(b t + c), f' = -b h f, h = tanh(b t + c), A = cosh(c)
      Coeffs<T> f = make(M + 1), h = make(M + 1);
      h[0] = tanh(p.alpha * t0 + p.shift);
      f[0] = cosh(p.shift) / cosh(p.alpha * t0 + p.shift);
      for (int k = 0; k < M; ++k) {
        T h2 = T(0), hf = T(0);
        for (int i = 0; i <= k; ++i) {
          h2 += h[i] * h[k - i];
          hf += h[i] * f[k - i];
        }
        h[k + 1] = p.alpha * ((k == 0 ? T(1) : T(0)) - h2) / T(k + 1);
        f[k + 1] = -p.alpha * hf / T(k + 1);
      }
      return f;
    }
    case AcFamily::DissSykLog: {
      // f = 1 + pref (log(a^2/J^2) - 2 log cosh(a t + c)); f' = -2 pref a h
      Coeffs<T> f = make(M + 1), h = make(M + 1);
      h[0] = tanh(p.alpha * t0 + p.shift);
      f[0] = T(1) + p.pref * (log(p.alpha * p.alpha / (p.jj * p.jj)) -
                              T(2) * log(cosh(p.alpha * t0 + p.shift)));
      for (int k = 0; k < M; ++k) {
        T h2 = T(0);
        for (int i = 0; i <= k; ++i) h2 += h[i] * h[k - i];
        h[k + 1] = p.alpha * ((k == 0 ? T(1) : T(0)) - h2) / T(k + 1);
        f[k + 1] = -T(2) * p.pref * p.alpha * h[k] / T(k + 1);
      }
      return f;
    }
  }
  throw std::logic_error("autocorr_series: unknown family");
}

}  // namespace krylov::series
