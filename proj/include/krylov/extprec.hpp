#pragma once

// Extended-precision scalar types for the ill-conditioned coefficient
// recursions: runtime-precision MPFR floats, exact integers/rationals, and a
// minimal complex wrapper that works over any of them.

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <string>

namespace krylov {

using mpreal =
    boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                  boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline void set_precision_digits(unsigned digits10) {
  mpreal::default_precision(digits10);
}
inline unsigned precision_digits() { return mpreal::default_precision(); }

// Scoped precision change (the engines bump precision internally).
struct PrecisionGuard {
  unsigned saved;
  explicit PrecisionGuard(unsigned digits10) : saved(mpreal::default_precision()) {
    mpreal::default_precision(digits10);
  }
  ~PrecisionGuard() { mpreal::default_precision(saved); }
};

template <class T>
struct Cx {
  T re{}, im{};
  Cx() = default;
  Cx(T r) : re(std::move(r)) {}
  Cx(T r, T i) : re(std::move(r)), im(std::move(i)) {}

  Cx operator-() const { return Cx(-re, -im); }
  Cx& operator+=(const Cx& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Cx& operator-=(const Cx& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  friend Cx operator+(Cx a, const Cx& b) { return a += b; }
  friend Cx operator-(Cx a, const Cx& b) { return a -= b; }
  friend Cx operator*(const Cx& a, const Cx& b) {
    return Cx(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  friend Cx operator/(const Cx& a, const Cx& b) {
    const T d = b.re * b.re + b.im * b.im;
    return Cx((a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d);
  }
  Cx& operator*=(const Cx& o) { return *this = *this * o; }
  Cx& operator/=(const Cx& o) { return *this = *this / o; }
  bool operator==(const Cx& o) const { return re == o.re && im == o.im; }
};

template <class T>
T abs2(const Cx<T>& z) {
  return z.re * z.re + z.im * z.im;
}

inline double to_double(const mpreal& x) { return x.template convert_to<double>(); }
inline double to_double(const BigRat& x) { return x.template convert_to<double>(); }
inline double to_double(double x) { return x; }

template <class T>
std::complex<double> to_cxd(const Cx<T>& z) {
  return {to_double(z.re), to_double(z.im)};
}

// Principal-branch square root; not defined for the exact rational field.
inline Cx<mpreal> sqrt_cx(const Cx<mpreal>& z) {
  using boost::multiprecision::sqrt;
  const mpreal r = sqrt(abs2(z));
  if (r == 0) return Cx<mpreal>(mpreal(0));
  if (z.re >= 0) {
    const mpreal t = sqrt((r + z.re) / 2);
    return Cx<mpreal>(t, z.im / (2 * t));
  }
  const mpreal t = sqrt((r - z.re) / 2);
  if (z.im >= 0) return Cx<mpreal>(z.im / (2 * t), t);
  return Cx<mpreal>(-z.im / (2 * t), -t);
}

}  // namespace krylov
