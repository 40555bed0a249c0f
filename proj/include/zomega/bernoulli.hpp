#pragma once

// Exact Bernoulli numbers B_{2j} over the rationals, computed once by the
// classical recurrence sum_{j<m} C(m+1,j) B_j = -(m+1) B_m and cached.

#include "zomega/numeric.hpp"

#include <vector>

namespace zomega {

// B_{2j} for j = 1..pairs (B_2, B_4, ...). Grows an internal table on demand;
// the table is built under a lock, so concurrent readers are safe.
std::vector<rational> bernoulli_even(int pairs);

// B_{2j} / (2j)! for j = 1..pairs as the requested real type.
template <class Real>
std::vector<Real> bernoulli_over_factorial(int pairs) {
  std::vector<rational> b = bernoulli_even(pairs);
  std::vector<Real> out(b.size());
  for (int j = 1; j <= pairs; ++j) {
    rational f = b[j - 1];
    for (int i = 2; i <= 2 * j; ++i) f /= i;
    // exact rational -> Real via separate numerator/denominator conversion
    out[j - 1] =
        real_from_bigint<Real>(bigint(numerator(f))) / real_from_bigint<Real>(bigint(denominator(f)));
  }
  return out;
}

}  // namespace zomega
