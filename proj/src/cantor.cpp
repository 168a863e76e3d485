#include "floquetlab/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "floquetlab/error.hpp"

namespace floquetlab {

namespace {

using boost::multiprecision::cpp_int;

// Exact ternary digit stream of a double in [0, 1): x = r / 2^k.
class TernaryDigits {
 public:
  explicit TernaryDigits(double x) {
    int exp = 0;
    const double mant = std::frexp(x, &exp);  // x = mant * 2^exp, mant in [0.5, 1)
    // mant * 2^53 is an integer.
    remainder_ = cpp_int(static_cast<long long>(std::ldexp(mant, 53)));
    shift_ = 53 - exp;
    if (x == 0.0) {
      remainder_ = 0;
      shift_ = 0;
    }
  }

  int next() {
    if (remainder_ == 0) return 0;
    const cpp_int t = remainder_ * 3;
    const cpp_int digit = t >> shift_;
    remainder_ = t - (digit << shift_);
    return static_cast<int>(digit);
  }

  // Current remainder as a fraction of one ternary unit, in [0, 1).
  double fraction() const {
    if (remainder_ == 0) return 0.0;
    return std::ldexp(static_cast<double>(remainder_), -static_cast<int>(shift_));
  }

 private:
  cpp_int remainder_;
  unsigned shift_ = 0;
};

void require_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(what) + ": x must lie in [0, 1]");
}

}  // namespace

double cantor_value(double x, std::size_t depth) {
  require_unit_interval(x, "cantor_value");
  if (depth < 1) throw DomainError("cantor_value: depth must be >= 1");
  if (x == 1.0) return 1.0;
  TernaryDigits digits(x);
  double value = 0.0;
  double bit = 0.5;
  for (std::size_t i = 0; i < depth; ++i, bit *= 0.5) {
    const int d = digits.next();
    if (d == 1) return value + bit;
    if (d == 2) value += bit;
  }
  return value;
}

double removed_measure(std::size_t depth) {
  if (depth < 1) throw DomainError("removed_measure: depth must be >= 1");
  double acc = 0.0;
  double term = 1.0 / 3.0;
  for (std::size_t k = 1; k <= depth; ++k) {
    acc += term;
    term *= 2.0 / 3.0;
  }
  return acc;
}

bool in_cantor_set(double x, std::size_t depth) {
  require_unit_interval(x, "in_cantor_set");
  if (depth < 1) throw DomainError("in_cantor_set: depth must be >= 1");
  if (x == 1.0 || x == 0.0) return true;
  const double tolerance = std::nextafter(x, 2.0) - x;
  TernaryDigits digits(x);
  double unit = 1.0;
  for (std::size_t i = 0; i < depth; ++i) {
    unit /= 3.0;
    if (digits.next() == 1) {
      // x sits in a removed open middle third whose endpoints are in the set.
      const double f = digits.fraction();
      return unit * std::min(f, 1.0 - f) <= tolerance;
    }
  }
  return true;
}

}  // namespace floquetlab
