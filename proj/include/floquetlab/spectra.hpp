#pragma once

// Spectral diagnostics for rank-N kicked operators.
//
// Growth machinery (pure point vs. continuous quasi-energy at finite
// truncation):
//   B^{-1}(x; N) = sum_{n<N} |a_n|^2 / sin^2((x - theta_n)/2)
//   S(x)         = {n : |x - theta_n| <= |a_n|}            (Combescure count)
//   J_N(x)       = [x/2pi - N^-gamma, x/2pi + N^-gamma],  |A - 2N^{1-gamma}| <= N D_N
//
// Eigenphase convention: thetas are the phases of the unperturbed unitary
// written as e^{i theta_n}, and lambda/hbar enters the kick as
// e^{i lambda P / hbar}. The builders in kicked.hpp use the conjugate
// convention (U = diag(e^{-i alpha_n T/hbar}), K = e^{-i lambda P/hbar}); an
// eigenphase x of such a V corresponds to mirror_phase(x) here.
//
// Also: the delta_eps kernel, the Tr G_eps diagnostic and the phi_tilde
// positivity function of the absolute-continuity argument.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "floquetlab/kicked.hpp"

namespace floquetlab {

// 2pi - x, wrapped to [0, 2pi).
double mirror_phase(double x);

// Circular distance on [0, 2pi).
double phase_distance(double a, double b);

// Throws SingularPointError if x is within Tolerances::singular_point of
// theta_n for some n < N with a_n != 0.
double b_inverse(double x, const PerturbationVector& psi, const EigenphaseSequence& thetas,
                 std::size_t n_terms);

// Partial sums at every rung of an increasing ladder, accumulated in one pass.
std::vector<double> b_inverse_ladder(double x, const PerturbationVector& psi,
                                     const EigenphaseSequence& thetas,
                                     std::span<const std::size_t> ladder);

// Point mass of the spectral measure of psi at e^{ix}: B(x)/sin^2(lambda/2hbar),
// with B(x) = 1/B^{-1}(x). Throws DomainError when lambda/hbar = 0 (mod 2pi).
double point_mass(double x, double lambda_over_hbar, double b_value);

// The complex expression -4(1+mu)/mu^2 * B with mu = e^{i lambda/hbar} - 1;
// its real part equals point_mass and its imaginary part vanishes.
std::complex<double> point_mass_complex_form(double lambda_over_hbar, double b_value);

// sum_n |a_n|^2 cot((x - theta_n)/2) - cot(lambda/2hbar). Vanishes exactly at
// the eigenphases of V on the cyclic subspace of psi.
double cotg_residual(double x, const PerturbationVector& psi, const EigenphaseSequence& thetas,
                     double lambda_over_hbar);

enum class CountVariant {
  combescure,  // |x - theta_n| <= |a_n|, the per-term threshold
  bourget,     // uniform threshold 2pi N^{2(1/2-gamma)} (ln N)^{-1/2}
};

const char* to_string(CountVariant v);
CountVariant count_variant_from_string(const std::string& s);

// #S(x) over n < N, distances measured on the circle. Requires N >= 2.
std::size_t count_S(double x, const PerturbationVector& psi, const EigenphaseSequence& thetas,
                    std::size_t n_terms, CountVariant variant);

struct IntervalCount {
  std::size_t count = 0;     // A(J_N(x), N)
  double expected = 0.0;     // 2 N^{1-gamma}
  double n_times_dn = 0.0;   // N D_N of (theta_n/2pi)_{n<N}

  bool inequality_holds() const;
};

// Counts theta_n/2pi, n < N, inside J_N(x). Throws DomainError if J_N(x)
// leaves [0, 1). Computes D_N from the same N points.
IntervalCount interval_count(double x, double gamma, const EigenphaseSequence& thetas,
                             std::size_t n_terms);

// Same, reusing a discrepancy computed by the caller for the first N points.
IntervalCount interval_count(double x, double gamma, const EigenphaseSequence& thetas,
                             std::size_t n_terms, double discrepancy);

// Classification thresholds for a B^{-1} truncation ladder.
struct BScanThresholds {
  double growth_slope = 0.1;       // log-log slope above which B^{-1} is "growing"
  double saturation_change = 0.01; // relative change over the last rung
};

struct BScanConfig {
  std::vector<double> x_grid;           // in (0, 2pi)
  std::vector<std::size_t> ladder;      // strictly increasing truncations
  CountVariant variant = CountVariant::combescure;
  BScanThresholds thresholds;

  void validate() const;
};

struct BScanCell {
  double x = 0.0;
  std::size_t n = 0;
  double b_inverse = 0.0;
  std::size_t count_s = 0;
  IntervalCount interval;
  bool interval_valid = false;  // J_N(x) inside [0, 1)
};

struct BScanSeries {
  double x = 0.0;
  bool singular = false;
  std::size_t singular_index = 0;
  std::vector<BScanCell> cells;  // one per ladder rung; empty when singular
  double b_slope = 0.0;
  double a_slope = 0.0;
  bool a_slope_valid = false;
  bool monotone = false;
  bool growth = false;
  bool saturated = false;
};

struct BScanResult {
  BScanConfig config;
  std::vector<BScanSeries> series;  // in x_grid order

  double growth_fraction() const;
  double saturation_fraction() const;
};

// Evaluates one x over the ladder; discrepancies[i] is D_N of the first
// ladder[i] points (see ladder_discrepancies).
BScanSeries scan_point(double x, const PerturbationVector& psi, const EigenphaseSequence& thetas,
                       const BScanConfig& config, std::span<const double> discrepancies);

// D_N of (theta_n/2pi)_{n<N} for each rung.
std::vector<double> ladder_discrepancies(const EigenphaseSequence& thetas,
                                         std::span<const std::size_t> ladder);

BScanResult run_b_scan(const BScanConfig& config, const PerturbationVector& psi,
                       const EigenphaseSequence& thetas);

// Poisson-type kernel (1/2pi)(1 - e^{-2eps})/(1 - 2e^{-eps} cos t + e^{-2eps}).
double delta_eps(double t, double epsilon);

// (1/2pi)(1 + 2 sum_{n=1}^{terms} e^{-n eps} cos(n t)), the defining series.
double delta_eps_series(double t, double epsilon, std::size_t terms);

// Adaptive Gauss-Kronrod quadrature of g(t) delta_eps(t) over [-pi, pi].
double delta_eps_integral(double epsilon);
double delta_eps_cos_moment(double epsilon);

// Tr G_eps(theta) = sum_n |A phi_n|^2 / |1 - e^{-eps} e^{i T alpha_n/hbar} e^{i theta}|^2.
// At eps = 0 theta must avoid every pole.
double g_eps_trace(std::span<const double> a_norms, std::span<const double> alphas, double period,
                   double hbar, double theta, double epsilon);

// Numerator and denominator of pi arctan(n/d).
double phi_numerator(double omega, double kappa);
double phi_denominator(double omega, double kappa);

// pi arctan(n(omega,kappa)/d(omega,kappa)); requires 0 <= kappa <= 1.
double phi_tilde(double omega, double kappa);

}  // namespace floquetlab
