#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include <boost/rational.hpp>

namespace floquetlab::testing {

using Rational = boost::rational<long long>;

// a + b sqrt(3) with rational a, b.
struct QSqrt3 {
  Rational a{0}, b{0};

  friend QSqrt3 operator+(QSqrt3 x, QSqrt3 y) { return {x.a + y.a, x.b + y.b}; }
  friend QSqrt3 operator-(QSqrt3 x, QSqrt3 y) { return {x.a - y.a, x.b - y.b}; }
  friend QSqrt3 operator*(QSqrt3 x, QSqrt3 y) {
    return {x.a * y.a + 3 * x.b * y.b, x.a * y.b + x.b * y.a};
  }
  friend bool operator==(QSqrt3 x, QSqrt3 y) { return x.a == y.a && x.b == y.b; }
};

using Q3Matrix = std::array<std::array<QSqrt3, 3>, 3>;

inline Q3Matrix q3_product(const Q3Matrix& x, const Q3Matrix& y) {
  Q3Matrix out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i][j] = out[i][j] + x[i][k] * y[k][j];
  return out;
}

// Extreme discrepancy by enumerating every interval with endpoints in
// {0, 1, x_i} and every open/closed combination. Points are k / 2^20 and the
// comparison is carried out in integers.
inline double brute_force_discrepancy(const std::vector<std::int64_t>& ks) {
  constexpr std::int64_t kScale = std::int64_t{1} << 20;
  const auto n = static_cast<std::int64_t>(ks.size());
  std::vector<std::int64_t> ends{0, kScale};
  ends.insert(ends.end(), ks.begin(), ks.end());
  std::int64_t best = 0;
  for (std::int64_t a : ends) {
    for (std::int64_t b : ends) {
      if (b < a) continue;
      for (int closed_a = 0; closed_a < 2; ++closed_a) {
        for (int closed_b = 0; closed_b < 2; ++closed_b) {
          if (a == b && !(closed_a && closed_b)) continue;
          std::int64_t count = 0;
          for (std::int64_t k : ks) {
            const bool left = closed_a ? k >= a : k > a;
            const bool right = closed_b ? k <= b : k < b;
            if (left && right) ++count;
          }
          best = std::max(best, std::abs(count * kScale - n * (b - a)));
        }
      }
    }
  }
  return static_cast<double>(best) / static_cast<double>(n * kScale);
}

}  // namespace floquetlab::testing
