#include "floquetlab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "floquetlab/error.hpp"
#include "floquetlab/numtheory.hpp"

namespace floquetlab {

namespace {

constexpr double kPi = std::numbers::pi;

// theta/2pi as a point of [0, 1).
double unit_point(double theta) {
  const double u = theta / kTwoPi;
  return u < 1.0 ? u : std::nextafter(1.0, 0.0);
}

double amplitude2(const PerturbationVector& psi, std::size_t n) {
  return std::norm(psi.coefficients(static_cast<Eigen::Index>(n)));
}

void require_terms(const PerturbationVector& psi, const EigenphaseSequence& thetas,
                   std::size_t n_terms, const char* what) {
  if (n_terms > static_cast<std::size_t>(psi.dim()) || n_terms > thetas.size()) {
    std::ostringstream os;
    os << what << ": N = " << n_terms << " exceeds the available terms (vector "
       << psi.dim() << ", eigenphases " << thetas.size() << ")";
    throw ContractError(os.str());
  }
}

[[noreturn]] void throw_singular(const char* what, double x, std::size_t n, double theta) {
  std::ostringstream os;
  os.precision(17);
  os << what << ": x = " << x << " coincides with theta_" << n << " = " << theta;
  throw SingularPointError(os.str(), n);
}

// Least-squares slope of log y against log x.
double log_slope(std::span<const double> x, std::span<const double> y) {
  const double k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

}  // namespace

double mirror_phase(double x) { return wrap_phase(-x); }

double phase_distance(double a, double b) {
  const double d = wrap_phase(a - b);
  return std::min(d, kTwoPi - d);
}

double b_inverse(double x, const PerturbationVector& psi, const EigenphaseSequence& thetas,
                 std::size_t n_terms) {
  require_terms(psi, thetas, n_terms, "b_inverse");
  double acc = 0.0;
  for (std::size_t n = 0; n < n_terms; ++n) {
    const double w = amplitude2(psi, n);
    if (w == 0.0) continue;
    if (phase_distance(x, thetas[n]) < Tolerances::singular_point)
      throw_singular("b_inverse", x, n, thetas[n]);
    const double s = std::sin(0.5 * (x - thetas[n]));
    acc += w / (s * s);
  }
  return acc;
}

std::vector<double> b_inverse_ladder(double x, const PerturbationVector& psi,
                                     const EigenphaseSequence& thetas,
                                     std::span<const std::size_t> ladder) {
  std::vector<double> out;
  out.reserve(ladder.size());
  double acc = 0.0;
  std::size_t done = 0;
  for (std::size_t rung : ladder) {
    if (rung < done) throw ContractError("b_inverse_ladder: ladder must be increasing");
    require_terms(psi, thetas, rung, "b_inverse_ladder");
    for (std::size_t n = done; n < rung; ++n) {
      const double w = amplitude2(psi, n);
      if (w == 0.0) continue;
      if (phase_distance(x, thetas[n]) < Tolerances::singular_point)
        throw_singular("b_inverse_ladder", x, n, thetas[n]);
      const double s = std::sin(0.5 * (x - thetas[n]));
      acc += w / (s * s);
    }
    done = rung;
    out.push_back(acc);
  }
  return out;
}

double point_mass(double /*x*/, double lambda_over_hbar, double b_value) {
  if (!(b_value >= 0.0)) throw DomainError("point_mass: B(x) must be non-negative");
  const double s = std::sin(0.5 * lambda_over_hbar);
  if (std::abs(s) < 1e-15) throw DomainError("point_mass: no kick (lambda/hbar = 0 mod 2pi)");
  return b_value / (s * s);
}

std::complex<double> point_mass_complex_form(double lambda_over_hbar, double b_value) {
  const std::complex<double> mu = std::polar(1.0, lambda_over_hbar) - 1.0;
  if (std::abs(mu) < 1e-15) throw DomainError("point_mass_complex_form: no kick");
  return -4.0 * (1.0 + mu) / (mu * mu) * b_value;
}

double cotg_residual(double x, const PerturbationVector& psi, const EigenphaseSequence& thetas,
                     double lambda_over_hbar) {
  const std::size_t n_terms = std::min<std::size_t>(static_cast<std::size_t>(psi.dim()), thetas.size());
  const double s = std::sin(0.5 * lambda_over_hbar);
  if (std::abs(s) < 1e-15) throw DomainError("cotg_residual: no kick (lambda/hbar = 0 mod 2pi)");
  double acc = 0.0;
  for (std::size_t n = 0; n < n_terms; ++n) {
    const double w = amplitude2(psi, n);
    if (w == 0.0) continue;
    if (phase_distance(x, thetas[n]) < Tolerances::singular_point)
      throw_singular("cotg_residual", x, n, thetas[n]);
    acc += w / std::tan(0.5 * (x - thetas[n]));
  }
  return acc - std::cos(0.5 * lambda_over_hbar) / s;
}

const char* to_string(CountVariant v) {
  return v == CountVariant::combescure ? "combescure" : "bourget";
}

CountVariant count_variant_from_string(const std::string& s) {
  if (s == "combescure") return CountVariant::combescure;
  if (s == "bourget") return CountVariant::bourget;
  throw ConfigError("unknown count variant '" + s + "' (expected combescure or bourget)");
}

std::size_t count_S(double x, const PerturbationVector& psi, const EigenphaseSequence& thetas,
                    std::size_t n_terms, CountVariant variant) {
  if (n_terms < 2) throw DomainError("count_S: N must be >= 2");
  require_terms(psi, thetas, n_terms, "count_S");
  std::size_t count = 0;
  if (variant == CountVariant::combescure) {
    for (std::size_t n = 0; n < n_terms; ++n) {
      const double a = std::abs(psi.coefficients(static_cast<Eigen::Index>(n)));
      if (phase_distance(x, thetas[n]) <= a) ++count;
    }
  } else {
    const double nn = static_cast<double>(n_terms);
    const double threshold = kTwoPi * std::pow(nn, 2.0 * (0.5 - psi.gamma)) / std::sqrt(std::log(nn));
    for (std::size_t n = 0; n < n_terms; ++n)
      if (phase_distance(x, thetas[n]) <= threshold) ++count;
  }
  return count;
}

bool IntervalCount::inequality_holds() const {
  return std::abs(static_cast<double>(count) - expected) <= n_times_dn * (1.0 + 1e-12) + 1e-12;
}

IntervalCount interval_count(double x, double gamma, const EigenphaseSequence& thetas,
                             std::size_t n_terms) {
  const std::size_t rung[] = {n_terms};
  return interval_count(x, gamma, thetas, n_terms, ladder_discrepancies(thetas, rung).front());
}

IntervalCount interval_count(double x, double gamma, const EigenphaseSequence& thetas,
                             std::size_t n_terms, double discrepancy) {
  if (n_terms < 1 || n_terms > thetas.size())
    throw ContractError("interval_count: N outside the eigenphase sequence");
  if (!(gamma > 0.0)) throw DomainError("interval_count: gamma must be positive");
  const double nn = static_cast<double>(n_terms);
  const double centre = x / kTwoPi;
  const double half = std::pow(nn, -gamma);
  const double lo = centre - half;
  const double hi = centre + half;
  if (lo < 0.0 || hi >= 1.0) {
    std::ostringstream os;
    os << "interval_count: J_N(x) = [" << lo << ", " << hi << "] is not inside [0, 1) for N = "
       << n_terms;
    throw DomainError(os.str());
  }
  IntervalCount out;
  for (std::size_t n = 0; n < n_terms; ++n) {
    const double u = unit_point(thetas[n]);
    if (u >= lo && u <= hi) ++out.count;
  }
  out.expected = 2.0 * std::pow(nn, 1.0 - gamma);
  out.n_times_dn = nn * discrepancy;
  return out;
}

void BScanConfig::validate() const {
  if (x_grid.empty()) throw ConfigError("b-scan: empty x grid");
  if (ladder.empty()) throw ConfigError("b-scan: empty N ladder");
  for (double x : x_grid)
    if (!(x > 0.0 && x < kTwoPi)) throw ConfigError("b-scan: x values must lie in (0, 2pi)");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 2) throw ConfigError("b-scan: ladder entries must be >= 2");
    if (i > 0 && ladder[i] <= ladder[i - 1])
      throw ConfigError("b-scan: ladder must be strictly increasing");
  }
}

double BScanResult::growth_fraction() const {
  if (series.empty()) return 0.0;
  const auto n = std::count_if(series.begin(), series.end(), [](const BScanSeries& s) { return s.growth; });
  return static_cast<double>(n) / static_cast<double>(series.size());
}

double BScanResult::saturation_fraction() const {
  if (series.empty()) return 0.0;
  const auto n = std::count_if(series.begin(), series.end(), [](const BScanSeries& s) { return s.saturated; });
  return static_cast<double>(n) / static_cast<double>(series.size());
}

std::vector<double> ladder_discrepancies(const EigenphaseSequence& thetas,
                                         std::span<const std::size_t> ladder) {
  std::vector<double> points;
  points.reserve(thetas.size());
  for (double t : thetas.theta) points.push_back(unit_point(t));
  std::vector<double> out;
  out.reserve(ladder.size());
  for (std::size_t rung : ladder) {
    if (rung < 1 || rung > points.size())
      throw ContractError("ladder_discrepancies: rung outside the eigenphase sequence");
    out.push_back(discrepancy_exact(std::span<const double>(points.data(), rung)));
  }
  return out;
}

BScanSeries scan_point(double x, const PerturbationVector& psi, const EigenphaseSequence& thetas,
                       const BScanConfig& config, std::span<const double> discrepancies) {
  BScanSeries s;
  s.x = x;
  std::vector<double> b;
  try {
    b = b_inverse_ladder(x, psi, thetas, config.ladder);
  } catch (const SingularPointError& e) {
    s.singular = true;
    s.singular_index = e.index();
    return s;
  }

  std::vector<double> n_vals, a_n, a_vals;
  for (std::size_t i = 0; i < config.ladder.size(); ++i) {
    BScanCell cell;
    cell.x = x;
    cell.n = config.ladder[i];
    cell.b_inverse = b[i];
    cell.count_s = count_S(x, psi, thetas, cell.n, config.variant);
    try {
      cell.interval = interval_count(x, psi.gamma, thetas, cell.n, discrepancies[i]);
      cell.interval_valid = true;
      if (cell.interval.count > 0) {
        a_n.push_back(static_cast<double>(cell.n));
        a_vals.push_back(static_cast<double>(cell.interval.count));
      }
    } catch (const DomainError&) {
      cell.interval_valid = false;
    }
    n_vals.push_back(static_cast<double>(cell.n));
    s.cells.push_back(cell);
  }

  s.monotone = std::is_sorted(b.begin(), b.end());
  if (b.size() >= 2 && b.front() > 0.0) {
    s.b_slope = log_slope(n_vals, b);
    const double last = b.back(), prev = b[b.size() - 2];
    s.saturated = std::abs(last - prev) / prev < config.thresholds.saturation_change;
  }
  s.growth = s.monotone && b.size() >= 2 && s.b_slope > config.thresholds.growth_slope;
  if (a_n.size() >= 2) {
    s.a_slope = log_slope(a_n, a_vals);
    s.a_slope_valid = true;
  }
  return s;
}

BScanResult run_b_scan(const BScanConfig& config, const PerturbationVector& psi,
                       const EigenphaseSequence& thetas) {
  config.validate();
  BScanResult result;
  result.config = config;
  const auto disc = ladder_discrepancies(thetas, config.ladder);
  for (double x : config.x_grid) result.series.push_back(scan_point(x, psi, thetas, config, disc));
  return result;
}

double delta_eps(double t, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("delta_eps: epsilon must be positive");
  const double r = std::exp(-epsilon);
  // 1 - 2r cos t + r^2 = (1 - r)^2 + 4 r sin^2(t/2), free of cancellation near t = 0.
  const double s = std::sin(0.5 * t);
  const double denom = (1.0 - r) * (1.0 - r) + 4.0 * r * s * s;
  return -std::expm1(-2.0 * epsilon) / denom / kTwoPi;
}

double delta_eps_series(double t, double epsilon, std::size_t terms) {
  if (!(epsilon > 0.0)) throw DomainError("delta_eps_series: epsilon must be positive");
  double acc = 0.0;
  for (std::size_t n = terms; n >= 1; --n)
    acc += std::exp(-static_cast<double>(n) * epsilon) * std::cos(static_cast<double>(n) * t);
  return (1.0 + 2.0 * acc) / kTwoPi;
}

namespace {

template <class F>
double integrate_kernel(F&& g, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("delta_eps quadrature: epsilon must be positive");
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double t) { return g(t) * delta_eps(t, epsilon); };
  // The kernel peaks at t = 0; splitting there lets bisection refine toward the peak.
  const double left = gauss_kronrod<double, 61>::integrate(f, -kPi, 0.0, 15, 1e-12);
  const double right = gauss_kronrod<double, 61>::integrate(f, 0.0, kPi, 15, 1e-12);
  return left + right;
}

}  // namespace

double delta_eps_integral(double epsilon) {
  return integrate_kernel([](double) { return 1.0; }, epsilon);
}

double delta_eps_cos_moment(double epsilon) {
  return integrate_kernel([](double t) { return std::cos(t); }, epsilon);
}

double g_eps_trace(std::span<const double> a_norms, std::span<const double> alphas, double period,
                   double hbar, double theta, double epsilon) {
  if (a_norms.size() != alphas.size()) throw ContractError("g_eps_trace: size mismatch");
  if (!(epsilon >= 0.0)) throw DomainError("g_eps_trace: epsilon must be >= 0");
  if (!(hbar > 0.0)) throw DomainError("g_eps_trace: hbar must be positive");
  const double r = std::exp(-epsilon);
  std::vector<double> terms(a_norms.size());
  for (std::size_t n = 0; n < a_norms.size(); ++n) {
    const double phase = wrap_phase(period * alphas[n] / hbar) + theta;
    // |1 - r e^{i phase}|^2 = (1 - r)^2 + 4 r sin^2(phase/2)
    const double s = std::sin(0.5 * phase);
    const double denom = (1.0 - r) * (1.0 - r) + 4.0 * r * s * s;
    if (epsilon == 0.0 && a_norms[n] != 0.0 &&
        phase_distance(phase, 0.0) < Tolerances::singular_point) {
      std::ostringstream os;
      os << "g_eps_trace: theta sits on the eigenphase of level " << n << " at eps = 0";
      throw SingularPointError(os.str(), n);
    }
    terms[n] = a_norms[n] * a_norms[n] / denom;
  }
  return pairwise_sum(terms);
}

double phi_numerator(double omega, double kappa) {
  const double q = 4.0 + omega * omega;
  return 4.0 * kappa *
         (q * q + kappa * omega * q + kappa * kappa * (4.0 - omega * omega) -
          kappa * kappa * kappa * omega);
}

double phi_denominator(double omega, double kappa) {
  const double q = 4.0 + omega * omega;
  const double k2 = kappa * kappa;
  return q * q * q - 2.0 * k2 * omega * omega * q - 16.0 * k2 * kappa * omega -
         k2 * k2 * (4.0 - omega * omega);
}

double phi_tilde(double omega, double kappa) {
  if (!(kappa >= 0.0 && kappa <= 1.0))
    throw DomainError("phi_tilde: kappa must lie in [0, 1]");
  if (!std::isfinite(omega)) throw DomainError("phi_tilde: non-finite omega");
  return kPi * std::atan(phi_numerator(omega, kappa) / phi_denominator(omega, kappa));
}

}  // namespace floquetlab
