#pragma once

// Euler-Maclaurin evaluation of zeta and its s-derivatives to order 8,
// valid for Re s > 0, s != 1, with a computable truncation bound.
//
// Writing P_j(s) = s(s+1)...(s+2j-2), the base identity with cutoff N and K
// correction pairs is
//
//   zeta(s) = sum_{m<N} m^{-s} + N^{1-s}/(s-1) + N^{-s}/2
//           + sum_{j=1..K} B_{2j}/(2j)! P_j(s) N^{-s-2j+1} + R_K(s),
//
//   R_K(s) = -1/(2K+1)! int_N^inf Btilde_{2K+1}(x) P(s) x^{-s-2K-1} dx,
//
// with P(s) = s(s+1)...(s+2K). Derivatives in s are taken term by term
// (Leibniz on the products). The remainder after n differentiations obeys
//
//   |R_K^(n)(s)| <= 4/(2pi)^{2K+1} *
//                   sum_i C(n,i) |P^(i)(s)| I_{n-i}(sigma + 2K, N),
//
// using |Btilde_m(x)|/m! <= 2 zeta(m)/(2pi)^m <= 4/(2pi)^m and the
// elementary integrals I_p(a,N) = int_N^inf (log x)^p x^{-a-1} dx, which
// satisfy I_0 = N^-a / a and I_p = (log N)^p N^-a / a + (p/a) I_{p-1}.
//
// The reported error_bound is twice the truncation bound plus a rounding
// floor proportional to the accumulated term magnitudes; the factor two is
// the single inflation applied on top of the analytic estimate.

#include "zomega/bernoulli.hpp"
#include "zomega/errors.hpp"
#include "zomega/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace zomega {

template <class Real>
struct EvalResult {
  cx<Real> s;
  cx<Real> value;
  Real error_bound;
  int64_t terms_used;  // Euler-Maclaurin cutoff N actually used
};

namespace detail {

// signed power (-y)^k for y >= 0
template <class Real>
Real neg_pow(const Real& y, int k) {
  Real p(1);
  for (int i = 0; i < k; ++i) p *= y;
  if (k & 1) p = -p;
  return p;
}

template <class Real>
Real pos_pow(const Real& y, int k) {
  Real p(1);
  for (int i = 0; i < k; ++i) p *= y;
  return p;
}

}  // namespace detail

template <class Real>
class ZetaEvaluator {
 public:
  struct Options {
    int bernoulli_pairs = 10;           // K, correction pairs in the formula
    int64_t initial_cutoff = 20;        // floor for the starting N
    int64_t max_cutoff = int64_t(1) << 26;
  };

  static constexpr int max_derivative = 8;

  explicit ZetaEvaluator(Options opt = Options{}) : opt_(opt) {
    if (opt_.bernoulli_pairs < 1 || opt_.bernoulli_pairs > 40)
      throw ContractError("bernoulli_pairs must lie in [1, 40]");
    build_tables();
  }

  // Adaptive evaluation: starts at N = max(ceil(|t|/pi), initial_cutoff) and
  // doubles the cutoff until error_bound <= target_error.
  EvalResult<Real> derivative(const cx<Real>& s, int n, const Real& target_error) const {
    check_point(s, n);
    if (!(target_error > Real(0)))
      throw ContractError("target_error must be positive");
    using std::ceil;
    double abs_t = to_double(s.im < Real(0) ? Real(-s.im) : s.im);
    int64_t n0 = (int64_t)std::ceil(abs_t / 3.14159265358979323846);
    int64_t cutoff = std::max<int64_t>(n0, opt_.initial_cutoff);
    for (;;) {
      Detail d = compute(s, n, cutoff);
      if (d.error_bound <= target_error)
        return {s, d.value, d.error_bound, cutoff};
      if (d.rounding_floor >= target_error)
        throw PrecisionUnreachable(
            "rounding floor of the working precision exceeds target_error");
      if (cutoff >= opt_.max_cutoff)
        throw PrecisionUnreachable(
            "cutoff limit reached before the error bound met target_error");
      cutoff *= 2;
    }
  }

  // Fixed-cutoff evaluation (used by truncation-stability checks).
  EvalResult<Real> derivative_fixed(const cx<Real>& s, int n, int64_t cutoff) const {
    check_point(s, n);
    if (cutoff < 2) throw ContractError("cutoff must be at least 2");
    Detail d = compute(s, n, cutoff);
    return {s, d.value, d.error_bound, cutoff};
  }

  EvalResult<Real> value(const cx<Real>& s, const Real& target_error) const {
    return derivative(s, 0, target_error);
  }

 private:
  struct Detail {
    cx<Real> value;
    Real error_bound;
    Real rounding_floor;
  };

  void check_point(const cx<Real>& s, int n) const {
    if (n < 0 || n > max_derivative)
      throw ContractError("derivative order must lie in [0, 8]");
    if (!(s.re > Real(0)))
      throw DomainError("zeta evaluation requires Re s > 0");
    if (s.re == Real(1) && s.im == Real(0)) throw PoleAt1();
  }

  void build_tables() {
    const int K = opt_.bernoulli_pairs;
    b_over_fact_ = bernoulli_over_factorial<Real>(K);
    // (s)_m as exact integer coefficient vectors, ascending powers
    std::vector<bigint> poly{bigint(0), bigint(1)};  // the factor s itself
    poch_.clear();
    auto snapshot = [&](std::vector<Real>& dst) {
      dst.resize(poly.size());
      for (size_t d = 0; d < poly.size(); ++d)
        dst[d] = real_from_bigint<Real>(poly[d]);
    };
    // poly holds s(s+1)...(s+i) after the loop body for factor i
    poch_.resize(K);
    snapshot(poch_[0]);  // (s)_1 = s
    int built = 1;       // number of linear factors currently in poly
    for (int j = 2; j <= K + 1; ++j) {
      // extend to 2j-1 factors (or 2K+1 for the tail step j = K+1)
      int want = (j <= K) ? (2 * j - 1) : (2 * K + 1);
      while (built < want) {
        int i = built;  // next factor is (s + i)
        poly.push_back(bigint(0));
        for (size_t d = poly.size() - 1; d >= 1; --d)
          poly[d] = poly[d - 1] + poly[d] * i;
        poly[0] *= i;
        ++built;
      }
      if (j <= K)
        snapshot(poch_[j - 1]);
      else
        snapshot(poch_tail_);
    }
  }

  // i-th derivative of the polynomial with ascending coeffs c, at s
  static cx<Real> poly_deriv_at(const std::vector<Real>& c, int i, const cx<Real>& s) {
    int deg = (int)c.size() - 1;
    if (i > deg) return cx<Real>(Real(0));
    // Horner over the derived coefficients c_d * d! / (d-i)!
    cx<Real> acc(Real(0));
    for (int d = deg; d >= i; --d) {
      Real f(1);
      for (int q = d - i + 1; q <= d; ++q) f *= q;
      acc = acc * s + cx<Real>(c[d] * f);
    }
    return acc;
  }

  Detail compute(const cx<Real>& s, int n, int64_t N) const {
    using std::exp;
    using std::log;
    const int K = opt_.bernoulli_pairs;
    const Real lnN = log(Real(N));
    const Real sigma = s.re;

    cx<Real> total(Real(0));
    Real mag(0);  // sum of magnitudes actually accumulated, for the rounding floor

    // main sum over m < N
    if (n == 0) {
      total += cx<Real>(Real(1));
      mag += Real(1);
    }
    for (int64_t m = 2; m < N; ++m) {
      Real lm = log(Real(m));
      cx<Real> base = exp(cx<Real>(-sigma * lm, -s.im * lm));
      Real fac = detail::neg_pow(lm, n);
      cx<Real> term = base * fac;
      total += term;
      Real am = term.re < Real(0) ? Real(-term.re) : term.re;
      Real bm = term.im < Real(0) ? Real(-term.im) : term.im;
      mag += am + bm;
    }

    // pole block: d^n/ds^n N^{1-s}/(s-1)
    {
      cx<Real> n1s = exp(cx<Real>((Real(1) - sigma) * lnN, -s.im * lnN));
      cx<Real> inv = cx<Real>(Real(1)) / (s - cx<Real>(Real(1)));
      cx<Real> invpow = inv;
      Real abs_inv = abs(inv);
      Real abs_invpow = abs_inv;
      cx<Real> acc(Real(0));
      Real accmag(0);
      Real bfact(1);
      for (int b = 0; b <= n; ++b) {
        if (b > 0) {
          bfact *= b;
          invpow = invpow * inv;
          abs_invpow *= abs_inv;
        }
        Real w = Real(binomial(n, b)) * bfact;
        Real lp = detail::neg_pow(lnN, n - b);
        Real sgn = (b & 1) ? Real(-1) : Real(1);
        acc += invpow * (w * lp * sgn);
        Real alp = lp < Real(0) ? -lp : lp;
        accmag += w * alp * abs_invpow;
      }
      total += n1s * acc;
      mag += abs(n1s) * accmag;
    }

    // half term and Bernoulli corrections share N^{-s}
    cx<Real> Ns = exp(cx<Real>(-sigma * lnN, -s.im * lnN));
    Real absNs = abs(Ns);
    {
      cx<Real> term = Ns * (detail::neg_pow(lnN, n) / Real(2));
      total += term;
      mag += absNs * detail::pos_pow(lnN, n) / Real(2);
    }
    {
      const Real rinv = Real(1) / Real(N);
      Real shift = rinv;  // N^{-(2j-1)}
      for (int j = 1; j <= K; ++j) {
        cx<Real> inner(Real(0));
        Real innermag(0);
        int itop = std::min(n, 2 * j - 1);
        for (int i = 0; i <= itop; ++i) {
          cx<Real> pd = poly_deriv_at(poch_[j - 1], i, s);
          Real w = Real(binomial(n, i));
          Real lp = detail::neg_pow(lnN, n - i);
          inner += pd * (w * lp);
          Real alp = lp < Real(0) ? -lp : lp;
          innermag += abs(pd) * w * alp;
        }
        Real bj = b_over_fact_[j - 1];
        Real abj = bj < Real(0) ? -bj : bj;
        total += Ns * inner * (bj * shift);
        mag += absNs * innermag * (abj * shift);
        shift *= rinv * rinv;
      }
    }

    // truncation bound
    Real trunc(0);
    {
      Real a = sigma + Real(2 * K);
      Real Nma = exp(-a * lnN);
      std::vector<Real> I(n + 1);
      I[0] = Nma / a;
      for (int p = 1; p <= n; ++p)
        I[p] = detail::pos_pow(lnN, p) * Nma / a + Real(p) / a * I[p - 1];
      Real acc(0);
      int itop = std::min(n, 2 * K + 1);
      for (int i = 0; i <= itop; ++i) {
        Real pd = abs(poly_deriv_at(poch_tail_, i, s));
        acc += Real(binomial(n, i)) * pd * I[n - i];
      }
      Real two_pi_pow(1);
      Real two_pi = Real(2) * pi_const<Real>();
      for (int i = 0; i < 2 * K + 1; ++i) two_pi_pow *= two_pi;
      trunc = Real(4) / two_pi_pow * acc;
    }

    Real floor_est = Real(8) * std::numeric_limits<Real>::epsilon() * mag;
    return {total, Real(2) * trunc + floor_est, floor_est};
  }

  Options opt_;
  std::vector<Real> b_over_fact_;
  std::vector<std::vector<Real>> poch_;
  std::vector<Real> poch_tail_;
};

// Laurent-sanity report: samples |zeta^(n)(s) (s-1)^{n+1}| / n! on the circle
// |s-1| = radius and compares the maximum against a pinned constant.
struct LaurentReport {
  int n = 0;
  double radius = 0;
  int samples = 0;
  double max_ratio = 0;
  double constant = 0;
  bool ok = false;
};

double laurent_constant(int n);
LaurentReport laurent_bound_check(int n, double radius, int samples = 64);

}  // namespace zomega
