#include "floquetlab/numtheory.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/constants/constants.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "floquetlab/error.hpp"

namespace floquetlab {

namespace {

constexpr double kTwoPiD = 2.0 * std::numbers::pi;

// Digits of HighPrecision that can certify |beta - p/q| < 1/q^2.
const HighPrecision kPrecisionFloor = HighPrecision("1e-90");

HighPrecision frac_hp(const HighPrecision& x) { return x - floor(x); }

HighPrecision nearest_int_distance(const HighPrecision& x) {
  const HighPrecision f = frac_hp(x);
  return f < 0.5 ? f : HighPrecision(1) - f;
}

// Exact product a*b = p + e.
inline void two_prod(double a, double b, double& p, double& e) {
  p = a * b;
  e = std::fma(a, b, -p);
}

inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

inline double frac_d(double x) { return x - std::floor(x); }

template <class T>
T pairwise_impl(std::span<const T> v) {
  constexpr std::size_t kLeaf = 16;
  if (v.size() <= kLeaf) {
    T acc{};
    for (const T& x : v) acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_impl(v.first(half)) + pairwise_impl(v.subspan(half));
}

UInt128 checked_power(std::uint64_t n, unsigned j) {
  UInt128 m = 1;
  constexpr auto kMax = ~static_cast<UInt128>(0);
  for (unsigned i = 0; i < j; ++i) {
    if (n != 0 && m > kMax / n) throw DomainError("sequence_mod1: n^j overflows 128 bits");
    m *= n;
  }
  return m;
}

std::vector<BigInt> parse_quotient_list(const std::string& body) {
  std::vector<BigInt> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
               item.end());
    if (item.empty()) continue;
    try {
      out.emplace_back(item);
    } catch (const std::exception&) {
      throw ConfigError("IrrationalSpec: bad partial quotient '" + item + "'");
    }
  }
  return out;
}

}  // namespace

FracDist frac_and_dist(double beta) {
  if (!std::isfinite(beta)) throw DomainError("frac_and_dist: non-finite input");
  double f = beta - std::floor(beta);
  if (f >= 1.0) f = 0.0;
  return {f, std::min(f, 1.0 - f)};
}

IrrationalSpec IrrationalSpec::from_value(HighPrecision value, std::string label) {
  if (!isfinite(value)) throw DomainError("IrrationalSpec: non-finite value");
  IrrationalSpec s;
  s.kind_ = Kind::value;
  s.value_ = std::move(value);
  s.label_ = std::move(label);
  return s;
}

IrrationalSpec IrrationalSpec::from_rational(BigInt numerator, BigInt denominator,
                                             std::string label) {
  if (denominator == 0) throw DomainError("IrrationalSpec: zero denominator");
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  const BigInt g = gcd(numerator < 0 ? BigInt(-numerator) : numerator, denominator);
  IrrationalSpec s;
  s.kind_ = Kind::rational;
  s.numerator_ = numerator / g;
  s.denominator_ = denominator / g;
  s.label_ = std::move(label);
  return s;
}

IrrationalSpec IrrationalSpec::from_quotients(std::vector<BigInt> quotients, std::string label) {
  if (quotients.empty()) throw DomainError("IrrationalSpec: empty partial quotient list");
  for (std::size_t i = 1; i < quotients.size(); ++i)
    if (quotients[i] < 1) throw DomainError("IrrationalSpec: partial quotients must be >= 1");
  IrrationalSpec s;
  s.kind_ = Kind::quotients;
  s.quotients_ = std::move(quotients);
  s.label_ = std::move(label);
  return s;
}

IrrationalSpec IrrationalSpec::parse(const std::string& raw) {
  std::string text;
  for (unsigned char c : raw)
    if (!std::isspace(c)) text.push_back(static_cast<char>(std::tolower(c)));
  if (text.empty()) throw ConfigError("IrrationalSpec: empty specification");

  const HighPrecision five(5), two(2), three(3);
  if (text == "golden") return from_value((sqrt(five) - 1) / 2, "golden");
  if (text == "phi") return from_value((sqrt(five) + 1) / 2, "phi");
  if (text == "sqrt2") return from_value(sqrt(two), "sqrt2");
  if (text == "sqrt2m1") return from_value(sqrt(two) - 1, "sqrt2m1");
  if (text == "sqrt3") return from_value(sqrt(three), "sqrt3");
  if (text == "e") return from_value(boost::math::constants::e<HighPrecision>(), "e");
  if (text == "pi") return from_value(boost::math::constants::pi<HighPrecision>(), "pi");
  if (text == "liouville") {
    // [0; 1, 10, 10^2, 10^4, 10^8, ...]
    std::vector<BigInt> q{0, 1};
    BigInt a = 10;
    for (int i = 0; i < 7; ++i) {
      q.push_back(a);
      a = (i == 0) ? BigInt(100) : BigInt(a * a);
    }
    return from_quotients(std::move(q), "liouville");
  }
  if (text.rfind("cf:", 0) == 0) return from_quotients(parse_quotient_list(text.substr(3)), text);
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    try {
      return from_rational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)), text);
    } catch (const DomainError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("IrrationalSpec: bad rational '" + raw + "'");
    }
  }
  try {
    std::size_t used = 0;
    (void)std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return from_value(HighPrecision(text), text);
  } catch (const std::exception&) {
    throw ConfigError("IrrationalSpec: cannot parse '" + raw + "'");
  }
}

HighPrecision IrrationalSpec::value() const {
  switch (kind_) {
    case Kind::value:
      return value_;
    case Kind::rational:
      return HighPrecision(numerator_) / HighPrecision(denominator_);
    case Kind::quotients: {
      HighPrecision acc = HighPrecision(quotients_.back());
      for (auto it = quotients_.rbegin() + 1; it != quotients_.rend(); ++it)
        acc = HighPrecision(*it) + 1 / acc;
      return acc;
    }
  }
  return 0;
}

ContinuedFraction continued_fraction(const IrrationalSpec& beta, std::size_t depth) {
  if (depth < 1) throw DomainError("continued_fraction: depth must be >= 1");
  ContinuedFraction cf;
  BigInt p_prev = 1, p_prev2 = 0, q_prev = 0, q_prev2 = 1;
  auto push = [&](const BigInt& a) {
    const BigInt p = a * p_prev + p_prev2;
    const BigInt q = a * q_prev + q_prev2;
    p_prev2 = p_prev;
    p_prev = p;
    q_prev2 = q_prev;
    q_prev = q;
    cf.quotients.push_back(a);
    cf.convergents.push_back({p, q});
  };

  switch (beta.kind()) {
    case IrrationalSpec::Kind::rational: {
      BigInt num = beta.numerator(), den = beta.denominator();
      while (cf.quotients.size() < depth) {
        // floor division for possibly negative numerators
        BigInt a = num / den;
        if (num % den != 0 && num < 0) a -= 1;
        push(a);
        const BigInt rem = num - a * den;
        if (rem == 0) {
          cf.terminated = true;
          break;
        }
        num = den;
        den = rem;
      }
      break;
    }
    case IrrationalSpec::Kind::quotients: {
      const auto& qs = beta.quotients();
      for (std::size_t i = 0; i < qs.size() && i < depth; ++i) push(qs[i]);
      if (cf.quotients.size() < depth) cf.precision_exhausted = true;
      break;
    }
    case IrrationalSpec::Kind::value: {
      HighPrecision x = beta.value();
      while (cf.quotients.size() < depth) {
        const HighPrecision a = floor(x);
        push(BigInt(a));
        const HighPrecision r = x - a;
        if (r == 0) {
          cf.terminated = true;
          break;
        }
        // Stop once the value can no longer certify the next convergent.
        if (r < kPrecisionFloor || HighPrecision(q_prev) * HighPrecision(q_prev) > 1 / kPrecisionFloor) {
          cf.precision_exhausted = true;
          break;
        }
        x = 1 / r;
      }
      break;
    }
  }
  return cf;
}

TypeEstimate type_estimate(const IrrationalSpec& beta, const BigInt& q_max, const BigInt& q_min) {
  if (q_max < 10) throw DomainError("type_estimate: Q must be >= 10");
  const ContinuedFraction cf = continued_fraction(beta, 400);

  TypeEstimate est;
  // <q_i beta> for convergent i, or a negative value when not computable.
  auto distance = [&](std::size_t i) -> HighPrecision {
    const BigInt& q = cf.convergents[i].q;
    if (beta.kind() == IrrationalSpec::Kind::quotients) {
      // |q_i beta - p_i| = 1 / (q_i alpha_{i+1} + q_{i-1}), alpha the complete quotient.
      const auto& qs = beta.quotients();
      if (i + 1 >= qs.size()) return HighPrecision(-1);
      HighPrecision alpha = HighPrecision(qs.back());
      for (std::size_t k = qs.size() - 1; k-- > i + 1;) alpha = HighPrecision(qs[k]) + 1 / alpha;
      const HighPrecision q_before = i == 0 ? HighPrecision(0) : HighPrecision(cf.convergents[i - 1].q);
      return 1 / (HighPrecision(q) * alpha + q_before);
    }
    return nearest_int_distance(HighPrecision(q) * beta.value());
  };

  std::optional<std::size_t> last_below;
  for (std::size_t i = 0; i < cf.convergents.size(); ++i) {
    const BigInt& q = cf.convergents[i].q;
    if (q > q_max) break;
    if (cf.terminated && i + 1 == cf.convergents.size()) {
      est.rational = true;
      est.eta_hat = std::numeric_limits<double>::infinity();
      est.q_at_max = q;
      return est;
    }
    if (q >= 2) last_below = i;
    if (q < q_min || q < 2) continue;
    const HighPrecision d = distance(i);
    if (d <= 0) continue;
    const double tau = static_cast<double>(log(1 / d) / log(HighPrecision(q)));
    ++est.samples;
    if (est.samples == 1 || tau > est.eta_hat) {
      est.eta_hat = tau;
      est.q_at_max = q;
    }
  }
  if (est.samples == 0 && last_below) {
    const HighPrecision d = distance(*last_below);
    if (d > 0) {
      const BigInt& q = cf.convergents[*last_below].q;
      est.eta_hat = static_cast<double>(log(1 / d) / log(HighPrecision(q)));
      est.q_at_max = q;
      est.samples = 1;
    }
  }
  if (est.samples == 0) throw NumericError("type_estimate: no usable convergent denominator <= Q");
  return est;
}

DoubleDouble DoubleDouble::from(const HighPrecision& x) {
  DoubleDouble d;
  d.hi = static_cast<double>(x);
  d.lo = static_cast<double>(x - HighPrecision(d.hi));
  return d;
}

double frac_multiple(UInt128 m, const DoubleDouble& beta) {
  // m = sum_i c_i 2^{26 i} with 26-bit limbs; every limb product with a
  // scaled component of beta is split exactly by two_prod and reduced mod 1.
  double s = 0.0, c = 0.0;
  auto accumulate = [&](double v) {
    double t, e;
    two_sum(s, v, t, e);
    s = t;
    c += e;
  };
  double scale = 1.0;
  while (m != 0) {
    const double limb = static_cast<double>(static_cast<std::uint64_t>(m & ((1u << 26) - 1)));
    m >>= 26;
    if (limb != 0.0) {
      for (double part : {beta.hi, beta.lo}) {
        double p, e;
        two_prod(limb, part * scale, p, e);
        accumulate(frac_d(p));
        accumulate(frac_d(e));
      }
    }
    scale *= 67108864.0;  // 2^26
    s = frac_d(s);
  }
  double r = frac_d(s) + c;
  r = frac_d(r);
  if (r >= 1.0) r = 0.0;
  return r;
}

double fractional_digits(UInt128 m, double abs_beta) {
  const double err = static_cast<double>(m) * abs_beta * std::ldexp(1.0, -104) + std::ldexp(1.0, -53);
  return -std::log10(err);
}

std::vector<double> sequence_mod1(unsigned j, const DoubleDouble& beta, std::size_t count) {
  if (j < 1) throw DomainError("sequence_mod1: j must be >= 1");
  std::vector<double> out(count);
  for (std::size_t n = 1; n <= count; ++n) out[n - 1] = frac_multiple(checked_power(n, j), beta);
  return out;
}

std::vector<double> sequence_mod1(unsigned j, double beta, std::size_t count) {
  return sequence_mod1(j, DoubleDouble{beta, 0.0}, count);
}

double discrepancy_exact(std::span<const double> points) {
  if (points.empty()) throw ContractError("discrepancy_exact: need at least one point");
  std::vector<double> x(points.begin(), points.end());
  for (double v : x)
    if (!(v >= 0.0 && v < 1.0)) throw ContractError("discrepancy_exact: point outside [0, 1)");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double g = static_cast<double>(i + 1) - n * x[i];
    hi = std::max(hi, g);
    lo = std::min(lo, g);
  }
  return (1.0 + hi - lo) / n;
}

double erdos_turan_bound(std::span<const double> points, std::size_t m) {
  if (m < 1) throw DomainError("erdos_turan_bound: m must be >= 1");
  if (points.empty()) throw ContractError("erdos_turan_bound: need at least one point");
  const double n = static_cast<double>(points.size());
  std::vector<std::complex<double>> terms(points.size());
  double acc = 1.0 / static_cast<double>(m);
  for (std::size_t h = 1; h <= m; ++h) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double phase = frac_d(static_cast<double>(h) * points[i]);
      terms[i] = std::polar(1.0, kTwoPiD * phase);
    }
    acc += std::abs(pairwise_sum(std::span<const std::complex<double>>(terms))) / n /
           static_cast<double>(h);
  }
  return kErdosTuranConstant * acc;
}

namespace {

std::complex<double> weyl_block(unsigned j, const DoubleDouble& beta, std::uint64_t h,
                                std::size_t first, std::size_t last,
                                std::vector<std::complex<double>>& scratch) {
  scratch.resize(last - first);
  for (std::size_t n = first; n < last; ++n) {
    const UInt128 m = checked_power(n, j) * h;
    scratch[n - first] = std::polar(1.0, kTwoPiD * frac_multiple(m, beta));
  }
  return pairwise_sum(std::span<const std::complex<double>>(scratch));
}

}  // namespace

WeylSum weyl_sum(unsigned j, const DoubleDouble& beta, std::uint64_t h, std::size_t count) {
  if (j < 1 || h < 1 || count < 1) throw DomainError("weyl_sum: j, h and N must be >= 1");
  std::vector<std::complex<double>> scratch;
  const auto s = weyl_block(j, beta, h, 1, count + 1, scratch);
  return {s, std::abs(s)};
}

WeylSum weyl_sum(unsigned j, double beta, std::uint64_t h, std::size_t count) {
  return weyl_sum(j, DoubleDouble{beta, 0.0}, h, count);
}

std::vector<WeylSum> weyl_sum_ladder(unsigned j, const DoubleDouble& beta, std::uint64_t h,
                                     std::span<const std::size_t> ladder) {
  if (j < 1 || h < 1) throw DomainError("weyl_sum_ladder: j and h must be >= 1");
  std::vector<WeylSum> out;
  std::vector<std::complex<double>> scratch;
  std::complex<double> running{};
  std::size_t done = 0;
  for (std::size_t n : ladder) {
    if (n < 1 || n < done) throw DomainError("weyl_sum_ladder: ladder must be increasing and >= 1");
    running += weyl_block(j, beta, h, done + 1, n + 1, scratch);
    done = n;
    out.push_back({running, std::abs(running)});
  }
  return out;
}

PowerLawFit exponent_fit(std::span<const double> n, std::span<const double> values,
                         double min_decades) {
  if (n.size() != values.size()) throw DomainError("exponent_fit: size mismatch");
  if (n.size() < 4) throw DomainError("exponent_fit: need at least 4 ladder points");
  std::vector<double> x(n.size()), y(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(n[i] > 0.0) || !(values[i] > 0.0) || !std::isfinite(values[i]))
      throw DomainError("exponent_fit: abscissae and values must be positive");
    x[i] = std::log(n[i]);
    y[i] = std::log(values[i]);
  }
  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  if ((*xmax - *xmin) / std::log(10.0) < min_decades - 1e-12) {
    std::ostringstream os;
    os << "exponent_fit: ladder spans fewer than " << min_decades << " decades";
    throw DomainError(os.str());
  }
  const double k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  PowerLawFit fit;
  fit.points = x.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr += r * r;
  }
  const double se = std::sqrt(ssr / (k - 2.0) / sxx);
  const boost::math::students_t dist(k - 2.0);
  fit.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  return fit;
}

std::pair<double, double> gamma_window(unsigned j, double eta) {
  if (j < 1) throw DomainError("gamma_window: j must be >= 1");
  if (!(eta >= 1.0)) throw DomainError("gamma_window: every real number has type eta >= 1");
  return {0.5, 0.5 + 1.0 / (2.0 * eta * static_cast<double>(j))};
}

double pairwise_sum(std::span<const double> values) { return pairwise_impl(values); }

std::complex<double> pairwise_sum(std::span<const std::complex<double>> values) {
  return pairwise_impl(values);
}

}  // namespace floquetlab
