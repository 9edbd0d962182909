#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rws {

inline constexpr std::int64_t kDefaultGridCap = 1'000'000;

// Number of count vectors of length m summing to k, i.e. C(k+m-1, m-1).
// Throws std::overflow_error beyond ~4e18.
inline std::int64_t simplex_grid_size(int m, int k) {
  if (m < 1 || k < 0) {
    throw std::invalid_argument("simplex_grid_size: need m >= 1, k >= 0");
  }
  double acc = 1.0;
  std::int64_t exact = 1;
  for (int j = 1; j <= m - 1; ++j) {
    acc *= static_cast<double>(k + j) / j;
    if (acc > 4.0e18) {
      throw std::overflow_error("simplex_grid_size: C(k+m-1, m-1) overflows");
    }
    exact = exact * (k + j) / j;  // divisible at each step: C(k+j, j)
  }
  return exact;
}

// Visits every count vector (x_0, ..., x_{m-1}) with x_i >= 0 and sum k,
// exactly once, in the fixed enumeration order with the leading coordinate
// varying slowest and ascending: m=2, k=3 gives (0,3), (1,2), (2,1), (3,0).
// f receives a pointer to the m counts; the buffer is reused across calls.
template <class F>
void for_each_count_vector(int m, int k, F&& f) {
  if (m < 1) throw std::invalid_argument("for_each_count_vector: m >= 1");
  if (m > 64) throw std::invalid_argument("for_each_count_vector: m too large");
  int counts[64];
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == m - 1) {
      counts[pos] = remaining;
      f(static_cast<const int*>(counts));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[pos] = c;
      self(self, pos + 1, remaining - c);
    }
  };
  rec(rec, 0, k);
}

}  // namespace rws
