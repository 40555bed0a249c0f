#include "zomega/bernoulli.hpp"

#include <mutex>

namespace zomega {

namespace {

std::mutex table_mutex;
// full sequence B_0, B_1, B_2, ... (B_1 = -1/2 convention)
std::vector<rational> table;

void extend_to(int m_max) {
  if (table.empty()) {
    table.push_back(rational(1));
    table.push_back(rational(-1, 2));
  }
  while ((int)table.size() <= m_max) {
    int m = (int)table.size();
    // sum_{j=0}^{m-1} C(m+1, j) B_j = -(m+1) B_m
    rational acc(0);
    bigint c(1);  // C(m+1, 0)
    for (int j = 0; j < m; ++j) {
      acc += rational(c) * table[j];
      // C(m+1, j+1) = C(m+1, j) * (m+1-j) / (j+1)
      c = c * (m + 1 - j) / (j + 1);
    }
    table.push_back(-acc / (m + 1));
  }
}

}  // namespace

std::vector<rational> bernoulli_even(int pairs) {
  std::lock_guard<std::mutex> lock(table_mutex);
  extend_to(2 * pairs);
  std::vector<rational> out;
  out.reserve(pairs);
  for (int j = 1; j <= pairs; ++j) out.push_back(table[2 * j]);
  return out;
}

}  // namespace zomega
