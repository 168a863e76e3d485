#pragma once

// Equidistribution toolkit: fractional parts, continued fractions and the
// irrational type, exact extreme discrepancy, the Erdos-Turan bound, Weyl
// sums and power-law exponent fits.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace floquetlab {

using HighPrecision = boost::multiprecision::cpp_bin_float_100;
using BigInt = boost::multiprecision::cpp_int;
__extension__ using UInt128 = unsigned __int128;

struct FracDist {
  double frac;  // {beta} in [0, 1)
  double dist;  // <beta>, distance to the nearest integer, in [0, 1/2]
};

FracDist frac_and_dist(double beta);

// A real number handed to the number-theory routines, either as a
// high-precision value, an exact rational, or a list of partial quotients.
class IrrationalSpec {
 public:
  enum class Kind { value, rational, quotients };

  static IrrationalSpec from_value(HighPrecision value, std::string label);
  static IrrationalSpec from_rational(BigInt numerator, BigInt denominator, std::string label);
  // [a0; a1, a2, ...]; a_i >= 1 for i >= 1.
  static IrrationalSpec from_quotients(std::vector<BigInt> quotients, std::string label);

  // Accepts "golden" ((sqrt5-1)/2), "phi" ((1+sqrt5)/2), "sqrt2", "sqrt2m1",
  // "sqrt3", "e", "pi", "p/q", "cf:a0,a1,...", "liouville", or a decimal literal.
  static IrrationalSpec parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }

  // Value to 100 significant digits. Quotient lists are evaluated as the
  // finite continued fraction they spell out.
  HighPrecision value() const;
  double to_double() const { return static_cast<double>(value()); }

  const std::vector<BigInt>& quotients() const noexcept { return quotients_; }
  const BigInt& numerator() const noexcept { return numerator_; }
  const BigInt& denominator() const noexcept { return denominator_; }

  friend bool operator==(const IrrationalSpec&, const IrrationalSpec&) = default;

 private:
  Kind kind_ = Kind::value;
  std::string label_;
  HighPrecision value_ = 0;
  BigInt numerator_ = 0;
  BigInt denominator_ = 1;
  std::vector<BigInt> quotients_;
};

struct Convergent {
  BigInt p;
  BigInt q;
};

struct ContinuedFraction {
  std::vector<BigInt> quotients;
  std::vector<Convergent> convergents;
  bool terminated = false;           // expansion ended exactly: the number is rational
  bool precision_exhausted = false;  // stopped early, value out of digits
};

ContinuedFraction continued_fraction(const IrrationalSpec& beta, std::size_t depth);

struct TypeEstimate {
  double eta_hat = 0.0;     // lower sample of the type over the window
  bool rational = false;    // expansion terminated: the type is unbounded
  BigInt q_at_max = 0;      // convergent denominator achieving eta_hat
  std::size_t samples = 0;  // convergent denominators in the window
};

// Default lower end of the denominator window in type_estimate.
inline constexpr std::uint64_t kTypeWindowStart = 4096;

// eta_hat = max log(1/<q beta>)/log q over convergent denominators q with
// q_min <= q <= q_max. If no convergent falls in the window, the largest
// convergent denominator <= q_max is used. Requires q_max >= 10.
TypeEstimate type_estimate(const IrrationalSpec& beta, const BigInt& q_max,
                           const BigInt& q_min = kTypeWindowStart);

// beta split into a double-double pair hi + lo.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  static DoubleDouble from(const HighPrecision& x);
};

// {m beta} for an integer multiplier m, accurate to roughly
// 2^-104 * m * |beta| absolute error.
double frac_multiple(UInt128 m, const DoubleDouble& beta);

// Estimated number of correct decimal digits of {m beta} from frac_multiple.
double fractional_digits(UInt128 m, double abs_beta);

// ({n^j beta})_{n=1..N}
std::vector<double> sequence_mod1(unsigned j, const DoubleDouble& beta, std::size_t count);
std::vector<double> sequence_mod1(unsigned j, double beta, std::size_t count);

// Extreme discrepancy sup_{0<=a<b<=1} |A([a,b),N)/N - (b-a)| via the sorted
// closed form 1/N + max_i(i/N - x_(i)) - min_i(i/N - x_(i)). Throws
// ContractError for points outside [0, 1).
double discrepancy_exact(std::span<const double> points);

// Explicit constant C in C (1/m + sum_{h<=m} |S_h/N| / h). With C = 6 this
// dominates the Kuipers-Niederreiter form of the Erdos-Turan inequality.
inline constexpr double kErdosTuranConstant = 6.0;

double erdos_turan_bound(std::span<const double> points, std::size_t m);

struct WeylSum {
  std::complex<double> sum;
  double modulus = 0.0;
};

// sum_{n=1}^N exp(2 pi i h n^j beta), phases reduced mod 1 first.
WeylSum weyl_sum(unsigned j, const DoubleDouble& beta, std::uint64_t h, std::size_t count);
WeylSum weyl_sum(unsigned j, double beta, std::uint64_t h, std::size_t count);

// |S(N)| at each N of an increasing ladder in a single pass.
std::vector<WeylSum> weyl_sum_ladder(unsigned j, const DoubleDouble& beta, std::uint64_t h,
                                     std::span<const std::size_t> ladder);

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;   // log(value) at log N = 0
  double half_width = 0.0;  // 95% confidence half-width of the slope
  std::size_t points = 0;
};

// Minimum log10 span of the abscissae accepted by exponent_fit.
inline constexpr double kFitMinDecades = 1.5;

// Least squares of log(value) against log(N). Requires >= 4 points spanning
// kFitMinDecades decades and positive values; throws DomainError otherwise.
PowerLawFit exponent_fit(std::span<const double> n, std::span<const double> values,
                         double min_decades = kFitMinDecades);

// (1/2, 1/2 + 1/(2 eta j)); eta >= 1, j >= 1.
std::pair<double, double> gamma_window(unsigned j, double eta);

// Pairwise summation. The reduction tree depends only on the length, so the
// result is bit-stable for a given input order.
double pairwise_sum(std::span<const double> values);
std::complex<double> pairwise_sum(std::span<const std::complex<double>> values);

}  // namespace floquetlab
