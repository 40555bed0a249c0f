#include "doctest.h"

#include "zomega/bernoulli.hpp"
#include "zomega/zeta.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace zomega;

namespace {

// ------------------------------------------------------------------------
// Oracles. Everything in this block is computed independently of the
// library's evaluation path: plain summation in double with explicit
// tail corrections, plus a few literature constants as anchors.
// ------------------------------------------------------------------------

constexpr double kPi = 3.14159265358979323846;
constexpr double kZeta2 = 1.6449340668482264365;   // pi^2/6
constexpr double kZeta3 = 1.2020569031595942854;
constexpr double kZetaHalf = -1.4603545088095868129;
constexpr double kZetaPrime2 = -0.93754825431584375370;
constexpr double kGamma0 = 0.57721566490153286061;
constexpr double kGamma1 = -0.07281584548367672486;
constexpr double kGamma2 = -0.00969036319287231848;
constexpr double kGamma3 = 0.00205383442030334587;

double kahan_sum(const std::vector<double>& v) {
  double s = 0, c = 0;
  for (double x : v) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

// zeta'(2) = -sum_{m>=2} log(m)/m^2. Tail handled by the Euler-Maclaurin
// expansion of f(x) = log(x)/x^2 starting at a = M+1:
//   sum_{m>=a} f(m) = (log a + 1)/a + f(a)/2 - f'(a)/12 + f'''(a)/720 - ...
// with f'(x) = (1 - 2 log x)/x^3 and f'''(x) = (26 - 24 log x)/x^5.
double oracle_zeta_prime_2() {
  const int M = 1000000;
  std::vector<double> terms;
  terms.reserve(M);
  for (int m = 2; m <= M; ++m) {
    double lm = std::log((double)m);
    terms.push_back(lm / ((double)m * m));
  }
  double s = kahan_sum(terms);
  double a = M + 1;
  double la = std::log(a);
  double tail = (la + 1) / a + (la / (a * a)) / 2 - (1 - 2 * la) / (a * a * a) / 12 +
                (26 - 24 * la) / std::pow(a, 5) / 720;
  return -(s + tail);
}

// Stieltjes constants gamma_k via the truncated limit definition with
// Euler-Maclaurin boundary corrections at M for g(x) = (log x)^k / x:
//   gamma_k = sum_{m<=M} g(m) - (log M)^{k+1}/(k+1)
//           - g(M)/2 - g'(M)/12 + g'''(M)/720 + O(M^-6).
double oracle_stieltjes(int k) {
  const int M = 1000000;
  std::vector<double> terms;
  terms.reserve(M);
  for (int m = 1; m <= M; ++m) {
    double lm = std::log((double)m);
    terms.push_back(std::pow(lm, k) / m);
  }
  double s = kahan_sum(terms);
  double x = M;
  double L = std::log(x);
  auto powL = [&](int p) { return p < 0 ? 0.0 : std::pow(L, p); };
  double g = powL(k) / x;
  double gp = (k * powL(k - 1) - powL(k)) / (x * x);
  // g''' = x^-4 [ a(k-2) L^{k-3} + (b(k-1) - 3a) L^{k-2} + (ck - 3b) L^{k-1} - 3c L^k ]
  // where a = k(k-1), b = -3k, c = 2 come from g''.
  double a3 = k * (k - 1.0), b3 = -3.0 * k, c3 = 2.0;
  double gppp = (a3 * (k - 2) * powL(k - 3) + (b3 * (k - 1) - 3 * a3) * powL(k - 2) +
                 (c3 * k - 3 * b3) * powL(k - 1) - 3 * c3 * powL(k)) /
                std::pow(x, 4);
  return s - powL(k + 1) / (k + 1) - g / 2 - gp / 12 + gppp / 720;
}

cx<real128> eval128(double sigma, double t, int n, double target = 1e-20) {
  ZetaEvaluator<real128> ev;
  return ev.derivative(cx<real128>(real128(sigma), real128(t)), n, real128(target)).value;
}

}  // namespace

TEST_CASE("oracle self-check: stieltjes constants match literature values") {
  CHECK(std::fabs(oracle_stieltjes(0) - kGamma0) < 1e-10);
  CHECK(std::fabs(oracle_stieltjes(1) - kGamma1) < 1e-10);
  CHECK(std::fabs(oracle_stieltjes(2) - kGamma2) < 1e-9);
  CHECK(std::fabs(oracle_stieltjes(3) - kGamma3) < 1e-9);
}

TEST_CASE("bernoulli numbers are exact rationals") {
  auto b = bernoulli_even(6);
  CHECK(b[0] == rational(1, 6));
  CHECK(b[1] == rational(-1, 30));
  CHECK(b[2] == rational(1, 42));
  CHECK(b[3] == rational(-1, 30));
  CHECK(b[4] == rational(5, 66));
  CHECK(b[5] == rational(-691, 2730));
}

TEST_CASE("zeta(2) and zeta(3) match closed form / literature") {
  auto v2 = eval128(2, 0, 0, 1e-25);
  CHECK(to_double(abs(v2 - cx<real128>(real128(kZeta2)))) < 1e-13);
  auto v3 = eval128(3, 0, 0, 1e-25);
  CHECK(to_double(abs(v3 - cx<real128>(real128(kZeta3)))) < 1e-13);
}

TEST_CASE("zeta(1/2) matches literature value") {
  auto v = eval128(0.5, 0, 0, 1e-20);
  CHECK(to_double(abs(v - cx<real128>(real128(kZetaHalf)))) < 1e-12);
}

TEST_CASE("zeta on Re s > 1 matches direct summation") {
  // s = 3 + 4i: direct sum to 10^6; the dropped tail is below
  // integral_M^inf x^-3 dx = 5e-13 in absolute value.
  cx<real128> direct(real128(0));
  for (int m = 1; m <= 1000000; ++m) {
    real128 lm = log(real128(m));
    direct += exp(cx<real128>(real128(-3) * lm, real128(-4) * lm));
  }
  auto v = eval128(3, 4, 0, 1e-20);
  CHECK(to_double(abs(v - direct)) < 1e-12);
}

TEST_CASE("zeta'(2) matches the summation oracle") {
  double oracle = oracle_zeta_prime_2();
  CHECK(std::fabs(oracle - kZetaPrime2) < 1e-11);  // oracle sanity anchor
  auto v = eval128(2, 0, 1, 1e-20);
  CHECK(to_double(abs(v - cx<real128>(real128(oracle)))) < 1e-10);
}

TEST_CASE("laurent expansion near the pole matches stieltjes oracle") {
  double g0 = oracle_stieltjes(0);
  double g1 = oracle_stieltjes(1);
  double g2 = oracle_stieltjes(2);
  double g3 = oracle_stieltjes(3);
  double d = 1e-3;  // s = 1.001

  // zeta(s) = 1/(s-1) + sum_k (-1)^k gamma_k (s-1)^k / k!
  double z_oracle = 1 / d + g0 - g1 * d + g2 * d * d / 2 - g3 * d * d * d / 6;
  auto z = eval128(1 + d, 0, 0, 1e-12);
  CHECK(to_double(abs(z - cx<real128>(real128(z_oracle)))) < 1e-8);

  // zeta'(s) = -1/(s-1)^2 - gamma_1 + gamma_2 (s-1) - gamma_3 (s-1)^2/2 + ...
  double zp_oracle = -1 / (d * d) - g1 + g2 * d - g3 * d * d / 2;
  auto zp = eval128(1 + d, 0, 1, 1e-12);
  CHECK(to_double(abs(zp - cx<real128>(real128(zp_oracle)))) < 1e-6);

  // zeta''(s) = 2/(s-1)^3 + gamma_2 - gamma_3 (s-1) + ...
  double zpp_oracle = 2 / (d * d * d) + g2 - g3 * d;
  auto zpp = eval128(1 + d, 0, 2, 1e-12);
  CHECK(to_double(abs(zpp - cx<real128>(real128(zpp_oracle)))) < 1e-3);
}

TEST_CASE("derivatives agree with central differences of one order lower") {
  // The n-th derivative path is independent of the (n-1)-th only in its
  // Leibniz bookkeeping, so a high-precision central difference makes a
  // useful cross-check: (f(s+h) - f(s-h)) / 2h = f'(s) + O(h^2 f''').
  ZetaEvaluator<real128> ev;
  real128 h = real128(1) / 100000;  // h^2 ~ 1e-10, fine for 1e-8 tolerances
  cx<real128> pts[] = {cx<real128>(real128(25) / 10, real128(3)),
                       cx<real128>(real128(6) / 10, real128(5)),
                       cx<real128>(real128(12) / 10, real128(-2))};
  for (const auto& s : pts) {
    for (int n = 1; n <= 4; ++n) {
      auto up = ev.derivative(cx<real128>(s.re + h, s.im), n - 1, real128(1e-25)).value;
      auto dn = ev.derivative(cx<real128>(s.re - h, s.im), n - 1, real128(1e-25)).value;
      auto fd = (up - dn) / (real128(2) * h);
      auto direct = ev.derivative(s, n, real128(1e-25)).value;
      CHECK(to_double(abs(fd - direct)) < 1e-8 * (1 + to_double(abs(direct))));
    }
  }
}

TEST_CASE("independent truncation orders agree") {
  ZetaEvaluator<real128> ev10(ZetaEvaluator<real128>::Options{10, 20, int64_t(1) << 26});
  ZetaEvaluator<real128> ev14(ZetaEvaluator<real128>::Options{14, 20, int64_t(1) << 26});
  cx<real128> pts[] = {cx<real128>(real128(2), real128(0)),
                       cx<real128>(real128(3), real128(0)),
                       cx<real128>(real128(1) / 2, real128(14))};
  for (const auto& s : pts) {
    for (int n : {0, 1, 3}) {
      auto a = ev10.derivative_fixed(s, n, 40);
      auto b = ev14.derivative_fixed(s, n, 73);
      CHECK(to_double(abs(a.value - b.value)) < 1e-10);
    }
  }
}

TEST_CASE("reported error bound dominates the true error") {
  // Both sides approximate the same exact value, so the check is the
  // triangle inequality |a - b| <= bound_a + bound_b with a much more
  // accurate reference b.
  ZetaEvaluator<real128> ev;
  cx<real128> pts[] = {cx<real128>(real128(6) / 10, real128(5)),
                       cx<real128>(real128(55) / 100, real128(100)),
                       cx<real128>(real128(2), real128(1) / 2),
                       cx<real128>(real128(9) / 10, real128(3)),
                       cx<real128>(real128(3), real128(50))};
  for (const auto& s : pts) {
    for (int n : {0, 1, 2, 4, 8}) {
      auto ref = ev.derivative(s, n, real128(1e-26));
      for (int64_t N : {48, 96, 192}) {
        if (N < to_double(s.im) / kPi) continue;
        auto r = ev.derivative_fixed(s, n, N);
        CHECK(to_double(abs(r.value - ref.value)) <=
              to_double(r.error_bound) + to_double(ref.error_bound));
      }
    }
  }
}

TEST_CASE("error bound shrinks as the cutoff doubles") {
  // Monotone while the analytic truncation term dominates; once the bound
  // hits the rounding floor of the working type (~1e-36 here, twenty orders
  // below any advertised tolerance) further doubling cannot help, so the
  // loop stops there. Three correction pairs keep the decay slow enough
  // that several doubling steps stay above that floor.
  ZetaEvaluator<real128> ev(ZetaEvaluator<real128>::Options{3, 20, int64_t(1) << 26});
  cx<real128> pts[] = {cx<real128>(real128(6) / 10, real128(5)),
                       cx<real128>(real128(2), real128(30)),
                       cx<real128>(real128(11) / 10, real128(0))};
  for (const auto& s : pts) {
    for (int n : {0, 2}) {
      double prev = 1e300;
      int steps = 0;
      for (int64_t N = 32; N <= 1024; N *= 2) {
        auto r = ev.derivative_fixed(s, n, N);
        double eb = to_double(r.error_bound);
        if (eb < 1e-30) break;
        CHECK(eb <= prev * (1 + 1e-9));
        prev = eb;
        ++steps;
      }
      CHECK(steps >= 2);  // the regime above the floor was actually observed
    }
  }
}

TEST_CASE("conjugate symmetry holds on random points") {
  ZetaEvaluator<real128> ev;
  std::mt19937 rng(20250821);
  std::uniform_real_distribution<double> usig(0.55, 3.0), ut(0.1, 60.0);
  for (int i = 0; i < 20; ++i) {
    double sg = usig(rng), t = ut(rng);
    int n = i % 4;
    auto a = ev.derivative(cx<real128>(real128(sg), real128(t)), n, real128(1e-20)).value;
    auto b = ev.derivative(cx<real128>(real128(sg), real128(-t)), n, real128(1e-20)).value;
    CHECK(to_double(abs(conj(a) - b)) < 1e-20 * (1 + to_double(abs(a))));
  }
}

TEST_CASE("value vanishes near the first nontrivial zero") {
  auto v = eval128(0.5, 14.134725141734693790, 0, 1e-20);
  CHECK(to_double(abs(v)) < 1e-9);
}

TEST_CASE("double instantiation tracks the multiprecision one") {
  ZetaEvaluator<double> evd;
  auto vd = evd.derivative(cx<double>(2.0, 0.0), 0, 1e-13);
  CHECK(std::fabs(vd.value.re - kZeta2) < 1e-13);
  CHECK(std::fabs(vd.value.im) < 1e-15);

  ZetaEvaluator<real128> evq;
  for (double t : {5.0, 37.5}) {
    auto a = evd.derivative(cx<double>(0.7, t), 1, 1e-11);
    auto b = evq.derivative(cx<real128>(real128(7) / 10, real128(t)), 1, real128(1e-20));
    CHECK(std::fabs(a.value.re - to_double(b.value.re)) < 1e-11);
    CHECK(std::fabs(a.value.im - to_double(b.value.im)) < 1e-11);
  }
}

TEST_CASE("contract violations are rejected") {
  ZetaEvaluator<real128> ev;
  CHECK_THROWS_AS(ev.derivative(cx<real128>(real128(1), real128(0)), 0, real128(1e-10)), PoleAt1);
  CHECK_THROWS_AS(ev.derivative(cx<real128>(real128(0), real128(3)), 0, real128(1e-10)),
                  DomainError);
  CHECK_THROWS_AS(ev.derivative(cx<real128>(real128(-1), real128(3)), 0, real128(1e-10)),
                  DomainError);
  CHECK_THROWS_AS(ev.derivative(cx<real128>(real128(2), real128(0)), 9, real128(1e-10)),
                  ContractError);
  CHECK_THROWS_AS(ev.derivative(cx<real128>(real128(2), real128(0)), -1, real128(1e-10)),
                  ContractError);
  CHECK_THROWS_AS(ev.derivative(cx<real128>(real128(2), real128(0)), 0, real128(0)),
                  ContractError);
  CHECK_THROWS_AS(ev.derivative_fixed(cx<real128>(real128(2), real128(0)), 0, 1), ContractError);
}

TEST_CASE("unreachable targets raise a numerical error") {
  ZetaEvaluator<double> evd;
  CHECK_THROWS_AS(evd.derivative(cx<double>(0.6, 5.0), 0, 1e-30), PrecisionUnreachable);
}

TEST_CASE("laurent circle check stays under the pinned ceiling") {
  for (int n : {0, 1, 2, 3}) {
    auto rep = laurent_bound_check(n, 0.5, 32);
    CHECK(rep.ok);
    CHECK(rep.max_ratio > 0.5);  // principal part alone contributes ~1
    CHECK(rep.max_ratio < rep.constant);
  }
  auto tight = laurent_bound_check(0, 0.1, 16);
  CHECK(tight.ok);
  CHECK(std::fabs(tight.max_ratio - 1.0) < 0.2);  // ratio -> 1 as radius -> 0
  CHECK_THROWS_AS(laurent_bound_check(0, 0.7, 16), ContractError);
}
