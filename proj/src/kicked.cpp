#include "floquetlab/kicked.hpp"

#include <cmath>
#include <sstream>

#include "floquetlab/error.hpp"

namespace floquetlab {

namespace {

constexpr double kOrthonormalTolerance = 1e-12;

}  // namespace

EigenvaluePolynomial::EigenvaluePolynomial(std::vector<double> beta) : beta_(std::move(beta)) {
  for (double b : beta_)
    if (!std::isfinite(b)) throw DomainError("EigenvaluePolynomial: non-finite coefficient");
  while (!beta_.empty() && beta_.back() == 0.0) beta_.pop_back();
  if (beta_.size() < 2) {
    throw DomainError(
        "EigenvaluePolynomial: need degree >= 1 with a non-zero leading coefficient");
  }
}

double EigenvaluePolynomial::operator()(double n) const {
  double acc = 0.0;
  for (auto it = beta_.rbegin(); it != beta_.rend(); ++it) acc = acc * n + *it;
  return acc;
}

ComplexMatrix PerturbationVector::projector() const {
  return coefficients * coefficients.adjoint();
}

void KickedSystemSpec::validate() const {
  if (dim == 0) throw ContractError("KickedSystemSpec: dimension must be positive");
  if (!(period > 0.0) || !(hbar > 0.0) || !std::isfinite(period) || !std::isfinite(hbar))
    throw ContractError("KickedSystemSpec: period and hbar must be positive and finite");
  if (strengths.size() != vectors.size())
    throw ContractError("KickedSystemSpec: one strength per kick vector required");
  if (vectors.size() > dim) throw ContractError("KickedSystemSpec: rank exceeds dimension");
  if (kick_sign != 1 && kick_sign != -1) throw ContractError("KickedSystemSpec: kick_sign must be +1 or -1");
  for (double l : strengths)
    if (!std::isfinite(l)) throw ContractError("KickedSystemSpec: non-finite kick strength");
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (static_cast<std::size_t>(vectors[k].dim()) != dim)
      throw ContractError("KickedSystemSpec: kick vector length differs from dimension");
    for (std::size_t l = k; l < vectors.size(); ++l) {
      const Complex overlap = vectors[k].coefficients.dot(vectors[l].coefficients);
      const double expected = (k == l) ? 1.0 : 0.0;
      if (std::abs(overlap - expected) > kOrthonormalTolerance) {
        std::ostringstream os;
        os << "KickedSystemSpec: <psi_" << k + 1 << "|psi_" << l + 1 << "> = " << overlap
           << ", kick vectors must be orthonormal";
        throw ContractError(os.str());
      }
    }
  }
}

std::vector<double> h0_eigenvalues(const EigenvaluePolynomial& poly, double hbar, std::size_t dim) {
  if (dim == 0) throw DomainError("h0_eigenvalues: dimension must be >= 1");
  std::vector<double> alphas(dim);
  for (std::size_t n = 0; n < dim; ++n) alphas[n] = hbar * poly(static_cast<double>(n));
  return alphas;
}

EigenphaseSequence eigenphase_sequence(const std::vector<double>& alphas, double period,
                                       double hbar) {
  if (!std::isfinite(period) || !std::isfinite(hbar) || hbar == 0.0)
    throw DomainError("eigenphase_sequence: period and hbar must be finite, hbar non-zero");
  EigenphaseSequence out;
  out.theta.reserve(alphas.size());
  for (double a : alphas) {
    if (!std::isfinite(a)) throw DomainError("eigenphase_sequence: non-finite eigenvalue");
    const double turns = a * period / (kTwoPi * hbar);
    double frac = turns - std::floor(turns);
    if (frac >= 1.0) frac = 0.0;
    out.theta.push_back(kTwoPi * frac);
  }
  return out;
}

std::vector<PerturbationVector> build_perturbation_vectors(double gamma, std::size_t dim,
                                                           std::size_t rank) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw DomainError("build_perturbation_vectors: gamma must be positive");
  if (rank == 0) throw DomainError("build_perturbation_vectors: rank must be >= 1");
  if (rank > dim / 2) {
    std::ostringstream os;
    os << "build_perturbation_vectors: insufficient support, rank " << rank
       << " exceeds dim/2 = " << dim / 2;
    throw DomainError(os.str());
  }

  std::vector<PerturbationVector> out;
  out.reserve(rank);
  for (std::size_t k = 1; k <= rank; ++k) {
    PerturbationVector v;
    v.gamma = gamma;
    v.offset = k % rank;
    v.stride = rank;
    v.coefficients = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
    // Smallest n >= 1 with n = k (mod rank) is k itself.
    double norm2 = 0.0;
    for (std::size_t n = k; n < dim; n += rank) {
      const double a = std::pow(static_cast<double>(n), -gamma);
      v.coefficients(static_cast<Eigen::Index>(n)) = a;
      norm2 += a * a;
    }
    v.scale = 1.0 / std::sqrt(norm2);
    v.coefficients *= v.scale;
    out.push_back(std::move(v));
  }
  return out;
}

UnitaryOperator free_evolution(const KickedSystemSpec& spec) {
  const auto alphas = h0_eigenvalues(spec.poly, spec.hbar, spec.dim);
  std::vector<double> phases(alphas.size());
  for (std::size_t n = 0; n < alphas.size(); ++n)
    phases[n] = -alphas[n] * spec.period / spec.hbar;
  return UnitaryOperator::diagonal(phases);
}

UnitaryOperator kick_operator(const KickedSystemSpec& spec) {
  spec.validate();
  const auto d = static_cast<Eigen::Index>(spec.dim);
  ComplexMatrix k = ComplexMatrix::Identity(d, d);
  for (std::size_t i = 0; i < spec.vectors.size(); ++i) {
    const Complex mu = std::polar(1.0, spec.kick_sign * spec.strengths[i] / spec.hbar) - 1.0;
    const ComplexVector& a = spec.vectors[i].coefficients;
    k.noalias() += mu * (a * a.adjoint());
  }
  return UnitaryOperator(std::move(k));
}

UnitaryOperator kick_operator_dense(const KickedSystemSpec& spec) {
  spec.validate();
  const auto d = static_cast<Eigen::Index>(spec.dim);
  ComplexMatrix w = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < spec.vectors.size(); ++i)
    w.noalias() += spec.strengths[i] * spec.vectors[i].projector();
  // Symmetrize away rounding so the Hermitian check sees an exact adjoint.
  w = 0.5 * (w + w.adjoint()).eval();
  // exp(s i/hbar W) = exp(-i t W) with t = -s/hbar.
  return unitary_from_hermitian(HermitianOperator(std::move(w)), -spec.kick_sign / spec.hbar);
}

UnitaryOperator build_floquet(const KickedSystemSpec& spec) {
  const UnitaryOperator u = free_evolution(spec);
  const UnitaryOperator k = kick_operator(spec);
  return spec.ordering == KickOrdering::kick_after_free ? k * u : u * k;
}

std::vector<ComplexMatrix> kick_residuals(const KickedSystemSpec& spec) {
  spec.validate();
  const UnitaryOperator u = free_evolution(spec);
  std::vector<ComplexMatrix> out;
  out.reserve(spec.vectors.size());
  for (std::size_t i = 0; i < spec.vectors.size(); ++i) {
    const Complex mu = std::polar(1.0, spec.kick_sign * spec.strengths[i] / spec.hbar) - 1.0;
    const ComplexMatrix p = spec.vectors[i].projector();
    out.push_back(spec.ordering == KickOrdering::kick_after_free ? ComplexMatrix(mu * p * u.matrix())
                                                               : ComplexMatrix(mu * u.matrix() * p));
  }
  return out;
}

KickedSystemSpec make_kicked_system(EigenvaluePolynomial poly, std::size_t dim, double gamma,
                                    std::size_t rank, double strength, double period,
                                    double hbar) {
  KickedSystemSpec spec;
  spec.dim = dim;
  spec.poly = std::move(poly);
  spec.period = period;
  spec.hbar = hbar;
  spec.vectors = build_perturbation_vectors(gamma, dim, rank);
  spec.strengths.assign(rank, strength);
  spec.validate();
  return spec;
}

namespace spin1 {

namespace {
constexpr Complex kI{0.0, 1.0};
}

ComplexMatrix jx() { return gell_mann(7); }

ComplexMatrix jy() {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(0, 2) = kI;
  m(2, 0) = -kI;
  return m;
}

ComplexMatrix jz() { return gell_mann(2); }

ComplexMatrix gell_mann(int index) {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  switch (index) {
    case 2:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case 7:
      m(1, 2) = -kI;
      m(2, 1) = kI;
      break;
    case 8: {
      const double s = 1.0 / std::sqrt(3.0);
      m(0, 0) = s;
      m(1, 1) = s;
      m(2, 2) = -2.0 * s;
      break;
    }
    default:
      throw DomainError("spin1::gell_mann: only lambda_2, lambda_7 and lambda_8 are provided");
  }
  return m;
}

}  // namespace spin1

UnitaryOperator build_kicked_top_spin1(double c1, double c4, double period, double c3) {
  if (!std::isfinite(c1) || !std::isfinite(c4) || !std::isfinite(period) || !std::isfinite(c3))
    throw DomainError("build_kicked_top_spin1: non-finite parameter");
  // lambda_7^3 = lambda_7, so exp(-i a lambda_7) = I + (cos a - 1) lambda_7^2 - i sin a lambda_7.
  const double a = c1 * period;
  const ComplexMatrix l7 = spin1::gell_mann(7);
  const ComplexMatrix rotation = ComplexMatrix::Identity(3, 3) + (std::cos(a) - 1.0) * (l7 * l7) -
                                 Complex(0.0, std::sin(a)) * l7;
  const double s = 1.0 / std::sqrt(3.0);
  Eigen::Vector3cd kick(std::polar(1.0, -c4 * s), std::polar(1.0, -c4 * s),
                        std::polar(1.0, 2.0 * c4 * s));
  ComplexMatrix v = std::polar(1.0, -c3) * (rotation * kick.asDiagonal());
  return UnitaryOperator(std::move(v));
}

}  // namespace floquetlab
