#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "floquetlab/error.hpp"
#include "floquetlab/spectra.hpp"

using namespace floquetlab;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

struct Rank1 {
  KickedSystemSpec spec;
  EigenphaseSequence thetas;
};

Rank1 golden_oscillator(std::size_t dim, double gamma, double lambda) {
  Rank1 r;
  r.spec = make_kicked_system(EigenvaluePolynomial({0.0, kTwoPi * kGolden}), dim, gamma, 1, lambda);
  r.thetas = eigenphase_sequence(h0_eigenvalues(r.spec.poly, r.spec.hbar, dim), r.spec.period,
                                 r.spec.hbar);
  return r;
}

}  // namespace

TEST_CASE("phase helpers") {
  CHECK(mirror_phase(0.0) == 0.0);
  CHECK(mirror_phase(1.0) == doctest::Approx(kTwoPi - 1.0));
  CHECK(phase_distance(0.1, kTwoPi - 0.1) == doctest::Approx(0.2));
  CHECK(phase_distance(1.0, 3.0) == doctest::Approx(2.0));
}

TEST_CASE("cot identity and point masses at dense eigenphases") {
  const double lambda = 1.3;
  const auto sys = golden_oscillator(64, 0.8, lambda);
  const auto v = build_floquet(sys.spec);
  const auto dec = eigenphases(v);
  const ComplexVector& psi = sys.spec.vectors[0].coefficients;

  std::vector<double> roots;
  for (std::size_t s = 0; s < dec.phases.size(); ++s) {
    const double w = std::norm(psi.dot(dec.vectors.col(static_cast<Eigen::Index>(s))));
    if (w < 1e-12) continue;  // outside the cyclic subspace of psi
    const double x = mirror_phase(dec.phases[s]);
    roots.push_back(x);
    CHECK(std::abs(cotg_residual(x, sys.spec.vectors[0], sys.thetas, lambda)) <= 1e-6);
    const double b = 1.0 / b_inverse(x, sys.spec.vectors[0], sys.thetas, 64);
    CHECK(point_mass(x, lambda, b) == doctest::Approx(w).epsilon(1e-8));
    const auto c = point_mass_complex_form(lambda, b);
    CHECK(c.real() == doctest::Approx(point_mass(x, lambda, b)).epsilon(1e-12));
    CHECK(std::abs(c.imag()) <= 1e-12 * std::abs(c.real()));
  }
  // support is n = 1..63, one eigenphase per gap of the sorted thetas
  REQUIRE(roots.size() == 63);
  std::vector<double> th(sys.thetas.theta.begin() + 1, sys.thetas.theta.end());
  std::sort(th.begin(), th.end());
  std::sort(roots.begin(), roots.end());
  for (std::size_t i = 0; i + 1 < th.size(); ++i) {
    const auto inside = std::count_if(roots.begin(), roots.end(),
                                      [&](double x) { return x > th[i] && x < th[i + 1]; });
    CHECK(inside == 1);
  }
}

TEST_CASE("cot residual sign convention") {
  // The unmirrored phases of V do not satisfy the identity.
  const auto sys = golden_oscillator(32, 1.0, 0.9);
  const auto dec = eigenphases(build_floquet(sys.spec));
  double worst = 0.0;
  for (std::size_t s = 0; s < dec.phases.size(); ++s) {
    const double w = std::norm(sys.spec.vectors[0].coefficients.dot(dec.vectors.col(static_cast<Eigen::Index>(s))));
    if (w < 1e-12) continue;
    worst = std::max(worst, std::abs(cotg_residual(dec.phases[s], sys.spec.vectors[0], sys.thetas, 0.9)));
  }
  CHECK(worst > 1e-3);
}

TEST_CASE("B inverse partial sums") {
  const auto sys = golden_oscillator(512, 1.0, 1.0);
  const auto& psi = sys.spec.vectors[0];
  const std::vector<std::size_t> ladder{16, 64, 256, 512};
  const auto lad = b_inverse_ladder(2.0, psi, sys.thetas, ladder);
  for (std::size_t i = 0; i < ladder.size(); ++i)
    CHECK(lad[i] == doctest::Approx(b_inverse(2.0, psi, sys.thetas, ladder[i])).epsilon(1e-13));
  CHECK(std::is_sorted(lad.begin(), lad.end()));
  // n = 0 carries no weight, so x = theta_0 = 0 is not a pole
  CHECK_NOTHROW(b_inverse(sys.thetas[0] + 1e-3, psi, sys.thetas, 8));
  try {
    (void)b_inverse(sys.thetas[5], psi, sys.thetas, 16);
    FAIL("expected a singular point");
  } catch (const SingularPointError& e) {
    CHECK(e.index() == 5);
  }
  CHECK_THROWS_AS(b_inverse(1.0, psi, sys.thetas, 513), ContractError);
}

TEST_CASE("B inverse dominates four times the Combescure count") {
  const auto sys = golden_oscillator(2048, 0.75, 1.0);
  const auto& psi = sys.spec.vectors[0];
  for (int i = 0; i < 32; ++i) {
    const double x = kTwoPi * (i + 0.5) / 32.0;
    for (std::size_t n : {64u, 512u, 2048u}) {
      const auto s = count_S(x, psi, sys.thetas, n, CountVariant::combescure);
      CHECK(b_inverse(x, psi, sys.thetas, n) >= 4.0 * static_cast<double>(s));
    }
  }
  CHECK(count_S(1.0, psi, sys.thetas, 2048, CountVariant::bourget) >=
        count_S(1.0, psi, sys.thetas, 64, CountVariant::bourget));
  CHECK_THROWS_AS(count_S(1.0, psi, sys.thetas, 1, CountVariant::combescure), DomainError);
  CHECK(count_variant_from_string("bourget") == CountVariant::bourget);
  CHECK(std::string(to_string(CountVariant::combescure)) == "combescure");
  CHECK_THROWS_AS(count_variant_from_string("other"), ConfigError);
}

TEST_CASE("interval count inequality") {
  const auto sys = golden_oscillator(4096, 0.75, 1.0);
  for (int i = 0; i < 16; ++i) {
    const double x = kTwoPi * (i + 0.5) / 16.0;
    for (std::size_t n : {1024u, 4096u}) {
      const auto c = interval_count(x, 0.75, sys.thetas, n);
      CHECK(c.inequality_holds());
      CHECK(c.expected == doctest::Approx(2.0 * std::pow(static_cast<double>(n), 0.25)));
    }
  }
  CHECK_THROWS_AS(interval_count(0.01, 0.75, sys.thetas, 64), DomainError);
  CHECK_THROWS_AS(interval_count(1.0, 0.75, sys.thetas, 5000), ContractError);
  IntervalCount bad{10, 2.0, 7.0};
  CHECK(!bad.inequality_holds());
}

TEST_CASE("b-scan configuration and flags") {
  BScanConfig cfg;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.x_grid = {1.0, 2.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.ladder = {64, 32};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.ladder = {256, 1024, 4096};
  cfg.x_grid = {0.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.x_grid = {1.0, 2.0, 4.0};
  CHECK_NOTHROW(cfg.validate());

  const auto fast = golden_oscillator(4096, 2.0, 1.0);
  const auto sat = run_b_scan(cfg, fast.spec.vectors[0], fast.thetas);
  CHECK(sat.saturation_fraction() == 1.0);
  for (const auto& s : sat.series) {
    CHECK(s.monotone);
    CHECK(s.cells.size() == 3);
  }

  const auto slow = golden_oscillator(4096, 0.6, 1.0);
  const auto grow = run_b_scan(cfg, slow.spec.vectors[0], slow.thetas);
  for (const auto& s : grow.series) {
    CHECK(s.growth == (s.monotone && s.b_slope > cfg.thresholds.growth_slope));
    REQUIRE(s.a_slope_valid);
    CHECK(s.a_slope == doctest::Approx(0.4).epsilon(0.5));
  }
  CHECK(grow.growth_fraction() > 0.0);

  // singular x is flagged rather than thrown
  cfg.x_grid = {fast.thetas[7]};
  const auto sing = run_b_scan(cfg, fast.spec.vectors[0], fast.thetas);
  CHECK(sing.series[0].singular);
  CHECK(sing.series[0].singular_index == 7);
  CHECK(sing.series[0].cells.empty());
}

TEST_CASE("delta_eps kernel") {
  for (double eps : {1.0, 0.1, 0.01}) {
    for (double t : {-3.0, -0.5, 0.0, 0.01, 2.0}) {
      const std::size_t terms = static_cast<std::size_t>(40.0 / eps);
      CHECK(delta_eps(t, eps) == doctest::Approx(delta_eps_series(t, eps, terms)).epsilon(1e-10));
    }
    CHECK(std::abs(delta_eps_integral(eps) - 1.0) <= 1e-8);
    CHECK(std::abs(delta_eps_cos_moment(eps) - std::exp(-eps)) <= 1e-8);
  }
  CHECK(delta_eps(0.0, 1e-3) == doctest::Approx(-std::expm1(-2e-3) / std::pow(-std::expm1(-1e-3), 2) / kTwoPi));
  CHECK_THROWS_AS(delta_eps(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(delta_eps_integral(-1.0), DomainError);
}

TEST_CASE("Tr G_eps against dense matrices") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  const Eigen::Index d = 4;
  ComplexMatrix a(d, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = Complex(g(rng), g(rng));
  const std::vector<double> alphas{0.0, 1.3, 2.9, 4.4};
  const double period = 0.8, hbar = 1.1, theta = 0.37;
  std::vector<double> norms;
  for (Eigen::Index n = 0; n < d; ++n) norms.push_back(a.col(n).norm());
  for (double eps : {0.0, 0.05, 1.0}) {
    ComplexMatrix f = ComplexMatrix::Zero(d, d);
    for (Eigen::Index n = 0; n < d; ++n)
      f(n, n) = 1.0 / (1.0 - std::exp(-eps) * std::polar(1.0, period * alphas[static_cast<std::size_t>(n)] / hbar + theta));
    const Complex dense = (a * f * f.adjoint() * a.adjoint()).trace();
    CHECK(g_eps_trace(norms, alphas, period, hbar, theta, eps) == doctest::Approx(dense.real()).epsilon(1e-12));
    CHECK(std::abs(dense.imag()) <= 1e-10);
  }
  const double pole = kTwoPi - period * alphas[2] / hbar;
  CHECK_THROWS_AS(g_eps_trace(norms, alphas, period, hbar, pole, 0.0), SingularPointError);
  CHECK_NOTHROW(g_eps_trace(norms, alphas, period, hbar, pole, 0.1));
}

TEST_CASE("phi_tilde") {
  CHECK(phi_tilde(0.0, 1.0) == doctest::Approx(std::numbers::pi * std::atan(4.0 / 3.0)).epsilon(1e-14));
  CHECK(phi_numerator(0.0, 1.0) == 80.0);
  CHECK(phi_denominator(0.0, 1.0) == 60.0);
  CHECK(phi_tilde(3.0, 0.0) == 0.0);
  double lo = 1e9;
  for (int i = 0; i <= 400; ++i)
    for (int k = 1; k <= 20; ++k) lo = std::min(lo, phi_tilde(-10.0 + 0.05 * i, 0.05 * k));
  CHECK(lo > 0.0);
  CHECK_THROWS_AS(phi_tilde(0.0, 1.5), DomainError);
  CHECK_THROWS_AS(phi_tilde(0.0, -0.1), DomainError);
}
