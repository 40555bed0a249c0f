#include "zomega/primes.hpp"

#include <cmath>
#include <string>

namespace zomega {

PrimeTable::PrimeTable(int64_t limit) : limit_(limit) {
  if (limit < 2) throw ContractError("sieve limit must be >= 2");
  std::vector<bool> composite((size_t)limit + 1, false);
  for (int64_t p = 2; p * p <= limit; ++p) {
    if (composite[(size_t)p]) continue;
    for (int64_t q = p * p; q <= limit; q += p) composite[(size_t)q] = true;
  }
  pi_.assign((size_t)limit + 1, 0);
  theta_.assign((size_t)limit + 1, 0.0);
  int32_t count = 0;
  double th = 0;
  for (int64_t m = 2; m <= limit; ++m) {
    if (!composite[(size_t)m]) {
      primes_.push_back(m);
      ++count;
      th += std::log((double)m);
    }
    pi_[(size_t)m] = count;
    theta_[(size_t)m] = th;
  }
}

int64_t PrimeTable::pi(int64_t m) const {
  if (m < 0 || m > limit_) throw ContractError("pi argument outside sieve range");
  return pi_[(size_t)m];
}

double PrimeTable::theta(int64_t m) const {
  if (m < 0 || m > limit_) throw ContractError("theta argument outside sieve range");
  return theta_[(size_t)m];
}

int64_t select_m(double x) {
  if (!(x >= 16)) throw ContractError("select_m requires x >= 16");
  double lx = std::log(x);
  double llx = std::log(lx);
  double target = lx / llx + 2;
  // pi(m) is an integer, so the first condition means pi(m) >= ceil(target)
  int64_t need = (int64_t)std::ceil(target);

  // p_n ~ n(log n + log log n); start at twice that and regrow if short
  double n = (double)need;
  double guess = n >= 6 ? n * (std::log(n) + std::log(std::log(n))) : 13.0;
  int64_t limit = std::max<int64_t>(64, (int64_t)(2 * guess));
  for (;;) {
    PrimeTable table(limit);
    if ((int64_t)table.primes().size() < need) {
      limit *= 2;
      continue;
    }
    int64_t m = table.primes()[(size_t)need - 1];
    if (table.theta(m) > lx)
      throw NoAdmissibleM("no m has enough primes under the log-weight budget; "
                          "x is below the asymptotic regime");
    // the conditions that were solved for, checked as stated
    if (!((double)table.pi(m) >= target && table.theta(m) <= lx))
      throw NumericalError("select_m postcondition failed");
    return m;
  }
}

bigint primorial(int64_t m) {
  if (m < 2) throw ContractError("primorial requires m >= 2");
  PrimeTable table(m);
  bigint n = 1;
  for (int64_t p : table.primes()) n *= p;
  return n;
}

double primorial_lower_bound(double x, int64_t k, const GrowthFunction& growth) {
  if (!(x >= 16)) throw ContractError("primorial_lower_bound requires x >= 16");
  if (k < 1) throw ContractError("primorial_lower_bound requires k >= 1");
  double lx = std::log(x);
  double llx = std::log(lx);
  return std::log((double)k) * (lx / llx) - conjugate(growth, (double)k).value;
}

namespace {

void validate_case_params(GrowthCase c, const GrowthCaseParams& p) {
  if (c == GrowthCase::case1) {
    if (!(p.eps > 0)) throw ContractError("case1 requires eps > 0");
    if (!(p.delta > 0 && p.delta < p.eps / 2 + 1))
      throw ContractError("case1 requires 0 < delta < eps/2 + 1");
  }
  if (c == GrowthCase::case4) {
    if (!(p.alpha > 0 && p.alpha < 1)) throw ContractError("case4 requires alpha in (0, 1)");
  }
}

}  // namespace

OptimalK optimal_k_clamped_log(double lx, GrowthCase c, const GrowthCaseParams& p) {
  validate_case_params(c, p);
  if (!(lx > 0)) throw ContractError("optimal_k requires x > 1");
  double llx = lx > 1 ? std::log(lx) : 0;
  double lllx = llx > 1 ? std::log(llx) : 0;

  OptimalK r;
  bool defined = true;
  switch (c) {
    case GrowthCase::case1:
      defined = llx > 0;
      if (defined) r.raw = lx / std::pow(llx, 2 + p.eps / 2 - p.delta);
      break;
    case GrowthCase::case2:
      defined = lllx > 0;
      if (defined) r.raw = lx * std::exp(-llx / lllx);
      break;
    case GrowthCase::case3:
      defined = lllx > 0;
      if (defined) r.raw = lx / (llx * lllx);
      break;
    case GrowthCase::case4:
      defined = llx > 0;
      if (defined)
        r.raw = lx * std::exp(-std::pow(llx, p.alpha) -
                              std::pow(llx, (3 * p.alpha - 1) / 2));
      break;
  }
  if (!defined) {
    // the nested logs the formula needs are not positive yet
    r.k = 2;
    r.clamped = true;
    return r;
  }
  int64_t k = (int64_t)std::floor(r.raw);
  if (k < 2) {
    r.k = 2;
    r.clamped = true;
  } else {
    r.k = k;
  }
  return r;
}

OptimalK optimal_k_clamped(double x, GrowthCase c, const GrowthCaseParams& p) {
  if (!(x > 1)) throw ContractError("optimal_k requires x > 1");
  return optimal_k_clamped_log(std::log(x), c, p);
}

int64_t optimal_k_log(double lx, GrowthCase c, const GrowthCaseParams& p) {
  OptimalK r = optimal_k_clamped_log(lx, c, p);
  if (r.clamped)
    throw RegimeTooSmall("tuned k lands below 2 at this x; raw value " +
                         std::to_string(r.raw));
  return r.k;
}

int64_t optimal_k(double x, GrowthCase c, const GrowthCaseParams& p) {
  if (!(x > 1)) throw ContractError("optimal_k requires x > 1");
  return optimal_k_log(std::log(x), c, p);
}

}  // namespace zomega
