#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "floquetlab/error.hpp"
#include "floquetlab/kicked.hpp"
#include "floquetlab/opcore.hpp"

using namespace floquetlab;

namespace {

// exp(-i t H) from the Taylor series, no eigensolver involved.
ComplexMatrix exp_series(const ComplexMatrix& h, double t, int terms) {
  const ComplexMatrix a = Complex(0.0, -t) * h;
  ComplexMatrix term = ComplexMatrix::Identity(h.rows(), h.cols());
  ComplexMatrix acc = term;
  for (int k = 1; k <= terms; ++k) {
    term = (term * a / static_cast<double>(k)).eval();
    acc += term;
  }
  return acc;
}

}  // namespace

TEST_CASE("wrap_phase lands in [0, 2pi)") {
  CHECK(wrap_phase(0.0) == 0.0);
  CHECK(wrap_phase(kTwoPi) == doctest::Approx(0.0));
  CHECK(wrap_phase(-1.0) == doctest::Approx(kTwoPi - 1.0));
  CHECK(wrap_phase(7.0) == doctest::Approx(7.0 - kTwoPi));
  for (double x : {-1e-300, -1e-17, 1e6, -1e6}) {
    const double w = wrap_phase(x);
    CHECK(w >= 0.0);
    CHECK(w < kTwoPi);
  }
}

TEST_CASE("operator construction validates its contract") {
  ComplexMatrix m(2, 2);
  m << 1.0, Complex(0.0, 1.0), Complex(0.0, 1.0), 2.0;
  CHECK_THROWS_AS(HermitianOperator{m}, ContractError);
  CHECK_THROWS_AS(HermitianOperator{ComplexMatrix::Zero(2, 3)}, ContractError);
  CHECK_THROWS_AS(UnitaryOperator{ComplexMatrix::Constant(2, 2, 1.0)}, ContractError);

  ComplexVector v(2);
  v << 1.0, 1.0;
  CHECK_THROWS_AS(StateVector{v}, ContractError);
  CHECK_NOTHROW(StateVector(v, false));
  CHECK_THROWS(StateVector::basis(3, 3));
}

TEST_CASE("unitary_from_hermitian matches the exponential series") {
  const HermitianOperator jx(spin1::jx());
  const ComplexMatrix reference = exp_series(jx.matrix(), 0.7, 40);
  const UnitaryOperator u = unitary_from_hermitian(jx, 0.7);
  CHECK(max_abs(u.matrix() - reference) <= 1e-10);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  ComplexMatrix a(6, 6);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = Complex(g(rng), g(rng));
  const ComplexMatrix h = 0.25 * (a + a.adjoint());
  const UnitaryOperator w = unitary_from_hermitian(HermitianOperator(h), 0.3);
  CHECK(max_abs(w.matrix() - exp_series(h, 0.3, 60)) <= 1e-10);
}

TEST_CASE("eigenphases reconstruct the operator") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const UnitaryOperator v = random_unitary(16, rng);
    CHECK(v.unitarity_defect() <= 1e-12);
    const auto d = eigenphases(v);
    REQUIRE(d.phases.size() == 16);
    CHECK(std::is_sorted(d.phases.begin(), d.phases.end()));
    CHECK(d.phases.front() >= 0.0);
    CHECK(d.phases.back() < kTwoPi);
    CHECK(max_abs(d.reconstruct() - v.matrix()) <= Tolerances::reconstruction);
    const ComplexMatrix gram = d.vectors.adjoint() * d.vectors;
    CHECK(max_abs(gram - ComplexMatrix::Identity(16, 16)) <= Tolerances::orthonormal);
  }
}

TEST_CASE("eigenphases of degenerate diagonal unitaries") {
  const std::vector<double> phases{0.5, 0.5, 0.5, -1.0, 3.0};
  const auto u = UnitaryOperator::diagonal(phases);
  const auto d = eigenphases(u);
  CHECK(d.phases[0] == doctest::Approx(0.5));
  CHECK(d.phases[2] == doctest::Approx(0.5));
  CHECK(d.phases[3] == doctest::Approx(3.0));
  CHECK(d.phases[4] == doctest::Approx(kTwoPi - 1.0));
  CHECK(max_abs(d.reconstruct() - u.matrix()) <= 1e-12);

  const auto id = eigenphases(UnitaryOperator::identity(4));
  for (double x : id.phases) CHECK((x < 1e-12 || x > kTwoPi - 1e-12));
}

TEST_CASE("apply_power agrees with matrix powers") {
  std::mt19937_64 rng(5);
  const UnitaryOperator v = random_unitary(8, rng);
  const StateVector psi = random_state(8, rng);
  ComplexMatrix p = ComplexMatrix::Identity(8, 8);
  for (int i = 0; i < 7; ++i) p = (p * v.matrix()).eval();
  const StateVector out = apply_power(v, psi, 7);
  CHECK((out.amplitudes() - p * psi.amplitudes()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK((apply_power(v, psi, 0).amplitudes() - psi.amplitudes()).norm() == 0.0);
}

TEST_CASE("trace_norm of known matrices") {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = Complex(0.0, -4.0);
  CHECK(trace_norm(d) == doctest::Approx(7.0).epsilon(1e-14));

  ComplexVector u(3), w(3);
  u << 1.0, Complex(0.0, 2.0), 0.5;
  w << Complex(1.0, 1.0), 0.0, -2.0;
  CHECK(trace_norm(u * w.adjoint()) == doctest::Approx(u.norm() * w.norm()).epsilon(1e-13));

  std::mt19937_64 rng(3);
  CHECK(trace_norm(random_unitary(10, rng).matrix()) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("seeded generators are reproducible") {
  std::mt19937_64 a(99), b(99);
  CHECK(random_unitary(5, a).matrix() == random_unitary(5, b).matrix());
  CHECK(random_state(5, a).amplitudes() == random_state(5, b).amplitudes());
}

TEST_CASE("composition checks unitarity and dimensions") {
  std::mt19937_64 rng(8);
  const auto a = random_unitary(4, rng);
  const auto b = random_unitary(4, rng);
  CHECK((a * b).unitarity_defect() <= 1e-12);
  CHECK(max_abs((a * a.adjoint()).matrix() - ComplexMatrix::Identity(4, 4)) <= 1e-12);
  CHECK_THROWS_AS(a * random_unitary(3, rng), ContractError);
}
