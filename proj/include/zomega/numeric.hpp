#pragma once

// Numeric foundation: multiprecision scalar types, a minimal complex template
// that works uniformly over double and the multiprecision reals, and small
// shared helpers (log_plus, binomials, deterministic pairwise reduction).

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace zomega {

namespace mp = boost::multiprecision;

// Working precisions: 128-bit mantissa is the default evaluation type,
// 256-bit is used by Dirichlet-series composition. Expression templates off
// so the types behave like plain scalars inside containers and cx<>.
using real128 = mp::number<mp::cpp_bin_float<128, mp::digit_base_2>, mp::et_off>;
using real256 = mp::number<mp::cpp_bin_float<256, mp::digit_base_2>, mp::et_off>;
using rational = mp::mpq_rational;
using bigint = mp::mpz_int;

using std::int64_t;

template <class Real>
Real pi_const() {
  return boost::math::constants::pi<Real>();
}

template <class Real>
double to_double(const Real& x) {
  if constexpr (std::is_same_v<Real, double>) {
    return x;
  } else {
    return x.template convert_to<double>();
  }
}

// exact integer -> Real; decimal-string round trip keeps multiprecision exact
template <class Real>
Real real_from_bigint(const bigint& x) {
  if constexpr (std::is_same_v<Real, double>) {
    return x.template convert_to<double>();
  } else {
    return Real(x.str());
  }
}

// log_+ x = max(0, log x); the growth-function machinery uses it for all
// logarithms of quantities that may drop below 1.
template <class Real>
Real log_plus(Real x) {
  using std::log;
  if (x <= Real(1)) return Real(0);
  return log(x);
}

// ---------------------------------------------------------------------------
// cx<Real>: minimal complex type over an arbitrary real scalar.
// std::complex is only specified for float/double/long double, so the
// multiprecision paths get this instead; double uses it too for uniformity.
// ---------------------------------------------------------------------------

template <class Real>
struct cx {
  Real re{};
  Real im{};

  cx() = default;
  cx(Real r) : re(std::move(r)) {}
  cx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

  cx& operator+=(const cx& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  cx& operator-=(const cx& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
};

template <class Real>
cx<Real> operator+(const cx<Real>& a, const cx<Real>& b) {
  return {a.re + b.re, a.im + b.im};
}
template <class Real>
cx<Real> operator-(const cx<Real>& a, const cx<Real>& b) {
  return {a.re - b.re, a.im - b.im};
}
template <class Real>
cx<Real> operator-(const cx<Real>& a) {
  return {-a.re, -a.im};
}
template <class Real>
cx<Real> operator*(const cx<Real>& a, const cx<Real>& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class Real>
cx<Real> operator*(const cx<Real>& a, const Real& s) {
  return {a.re * s, a.im * s};
}
template <class Real>
cx<Real> operator*(const Real& s, const cx<Real>& a) {
  return a * s;
}
template <class Real>
cx<Real> operator/(const cx<Real>& a, const Real& s) {
  return {a.re / s, a.im / s};
}

template <class Real>
cx<Real> operator/(const cx<Real>& a, const cx<Real>& b) {
  // Smith's algorithm; avoids overflow of |b|^2 for the double instantiation.
  using std::fabs;
  auto abs_r = [](const Real& v) { return v < Real(0) ? Real(-v) : v; };
  if (abs_r(b.re) >= abs_r(b.im)) {
    Real r = b.im / b.re;
    Real d = b.re + b.im * r;
    return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
  }
  Real r = b.re / b.im;
  Real d = b.re * r + b.im;
  return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
}

template <class Real>
bool operator==(const cx<Real>& a, const cx<Real>& b) {
  return a.re == b.re && a.im == b.im;
}

template <class Real>
cx<Real> conj(const cx<Real>& a) {
  return {a.re, -a.im};
}

template <class Real>
Real norm(const cx<Real>& a) {
  return a.re * a.re + a.im * a.im;
}

template <class Real>
Real abs(const cx<Real>& a) {
  using std::sqrt;
  using std::fabs;
  if (a.im == Real(0)) return a.re < Real(0) ? Real(-a.re) : a.re;
  if (a.re == Real(0)) return a.im < Real(0) ? Real(-a.im) : a.im;
  // scaled hypot
  Real ar = a.re < Real(0) ? Real(-a.re) : a.re;
  Real ai = a.im < Real(0) ? Real(-a.im) : a.im;
  if (ar < ai) std::swap(ar, ai);
  Real q = ai / ar;
  return ar * sqrt(Real(1) + q * q);
}

template <class Real>
Real arg(const cx<Real>& a) {
  using std::atan2;
  return atan2(a.im, a.re);
}

// e^{i theta}
template <class Real>
cx<Real> cis(const Real& theta) {
  using std::sin;
  using std::cos;
  return {cos(theta), sin(theta)};
}

template <class Real>
cx<Real> exp(const cx<Real>& a) {
  using std::exp;
  Real m = exp(a.re);
  return cis(a.im) * m;
}

template <class Real>
cx<Real> log(const cx<Real>& a) {
  using std::log;
  return {log(abs(a)), arg(a)};
}

// y^w for real y > 0, complex w
template <class Real>
cx<Real> pow_rc(const Real& y, const cx<Real>& w) {
  using std::log;
  Real ly = log(y);
  return exp(cx<Real>(w.re * ly, w.im * ly));
}

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Deterministic pairwise tree reduction; the result depends only on the
// element order, not on chunking or thread count.
template <class T>
T pairwise_sum(std::span<const T> v) {
  if (v.empty()) return T{};
  if (v.size() == 1) return v[0];
  if (v.size() <= 8) {
    T acc = v[0];
    for (size_t i = 1; i < v.size(); ++i) acc += v[i];
    return acc;
  }
  size_t half = v.size() / 2;
  T lo = pairwise_sum(v.subspan(0, half));
  T hi = pairwise_sum(v.subspan(half));
  return lo + hi;
}

// FNV-1a 64-bit, used for config hashes in reports and checkpoints.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_g17(double v);      // %.17g, lossless machine output
std::string format_sig(double v, int digits);
std::string hex_u64(std::uint64_t v);

}  // namespace zomega
