// Development helper: measures the circle maxima behind the pinned
// constants in src/zeta.cpp so they can be re-derived when needed.

#include "zomega/zeta.hpp"

#include <cstdio>

int main() {
  using namespace zomega;
  std::printf("max |zeta^(n)(s) (s-1)^{n+1}| / n! over |s-1| = r\n");
  std::printf("%3s %10s %10s %10s\n", "n", "r=0.1", "r=0.25", "r=0.5");
  for (int n = 0; n <= 8; ++n) {
    double m1 = laurent_bound_check(n, 0.10, 96).max_ratio;
    double m2 = laurent_bound_check(n, 0.25, 96).max_ratio;
    double m3 = laurent_bound_check(n, 0.50, 96).max_ratio;
    std::printf("%3d %10.6f %10.6f %10.6f\n", n, m1, m2, m3);
  }
  return 0;
}
