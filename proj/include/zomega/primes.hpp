#pragma once

// Prime-counting utilities and the primorial construction that turns a
// coefficient table into a lower bound: taking n = product of primes <= m
// keeps n <= x while the k-fold divisor count at n is k^pi(m), so
// log sup_{n<=x} a_n >= log k * (log x/log log x) - g*(k) once m is chosen
// with pi(m) >= log x/log log x + 2 and theta(m) <= log x.

#include "zomega/errors.hpp"
#include "zomega/growth.hpp"
#include "zomega/numeric.hpp"

#include <cstdint>
#include <vector>

namespace zomega {

// Eratosthenes table with prefix counts pi(m) and log-weights
// theta(m) = sum_{p<=m} log p. Built once, read-only afterwards.
class PrimeTable {
 public:
  explicit PrimeTable(int64_t limit);  // limit >= 2

  int64_t limit() const { return limit_; }
  const std::vector<int64_t>& primes() const { return primes_; }
  int64_t pi(int64_t m) const;    // 0 <= m <= limit
  double theta(int64_t m) const;  // 0 <= m <= limit

 private:
  int64_t limit_;
  std::vector<int64_t> primes_;
  std::vector<int32_t> pi_;
  std::vector<double> theta_;
};

// Smallest m with pi(m) >= log x/log log x + 2 and theta(m) <= log x.
// Both conditions are re-verified before returning. The sieve regrows on
// demand; m stays near log x, so the tables involved are tiny.
// Throws NoAdmissibleM when no m satisfies both (x below the regime where
// the two thresholds are compatible).
int64_t select_m(double x);  // x >= 16

// Exact product of the primes <= m, m >= 2. log of the result is theta(m).
bigint primorial(int64_t m);

// The construction's lower bound on log sup_{n<=x} a_n for a series whose
// coefficients dominate k-fold divisor counts:
//   log k * (log x / log log x) - g*(k).
// k = 1 is allowed but degenerate (the log k term vanishes). Propagates
// NotSuperlinear from the conjugate.
double primorial_lower_bound(double x, int64_t k, const GrowthFunction& growth);

// The four boundary presets share tuned choices of k; parameters mirror
// the growth-family constructors (case1 uses eps/delta, case4 uses alpha,
// case2 and case3 take none that matter here).
enum class GrowthCase { case1, case2, case3, case4 };

struct GrowthCaseParams {
  double eps = 0;
  double delta = 0;
  double A = 0;
  double alpha = 0;
};

struct OptimalK {
  int64_t k = 0;      // >= 2; equals floor(raw) when not clamped
  double raw = 0;     // the formula value before flooring
  bool clamped = false;
};

// Tuned k for the case at this x: explicit main terms only, floored.
// The strict form throws RegimeTooSmall when the floor lands below 2; the
// clamped form pins k = 2 instead and says so, for callers that want a
// usable k at desk-scale x. The _log forms take log x directly, since the
// interesting regimes sit far past the double range for x itself.
int64_t optimal_k(double x, GrowthCase c, const GrowthCaseParams& params);
int64_t optimal_k_log(double log_x, GrowthCase c, const GrowthCaseParams& params);
OptimalK optimal_k_clamped(double x, GrowthCase c, const GrowthCaseParams& params);
OptimalK optimal_k_clamped_log(double log_x, GrowthCase c, const GrowthCaseParams& params);

}  // namespace zomega
