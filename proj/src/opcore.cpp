#include "floquetlab/opcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "floquetlab/error.hpp"

namespace floquetlab {

namespace {

void require_square_finite(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw ContractError(os.str());
  }
  if (!m.allFinite()) {
    throw ContractError(std::string(what) + ": matrix has non-finite entries");
  }
}

}  // namespace

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double wrap_phase(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2pi.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

HermitianOperator::HermitianOperator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  require_square_finite(matrix_, "HermitianOperator");
  const double dev = max_abs(matrix_ - matrix_.adjoint());
  if (dev > Tolerances::hermitian) {
    std::ostringstream os;
    os << "HermitianOperator: max |M - M^dagger| = " << dev << " exceeds "
       << Tolerances::hermitian;
    throw ContractError(os.str());
  }
}

UnitaryOperator::UnitaryOperator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  require_square_finite(matrix_, "UnitaryOperator");
  const double defect = unitarity_defect();
  if (defect > Tolerances::unitary) {
    std::ostringstream os;
    os << "UnitaryOperator: max |M^dagger M - I| = " << defect << " exceeds "
       << Tolerances::unitary;
    throw ContractError(os.str());
  }
}

UnitaryOperator UnitaryOperator::identity(Eigen::Index dim) {
  if (dim <= 0) throw ContractError("UnitaryOperator::identity: dimension must be positive");
  return UnitaryOperator(ComplexMatrix::Identity(dim, dim), Unchecked{});
}

UnitaryOperator UnitaryOperator::diagonal(std::span<const double> phases) {
  if (phases.empty()) throw ContractError("UnitaryOperator::diagonal: no phases");
  const auto dim = static_cast<Eigen::Index>(phases.size());
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index n = 0; n < dim; ++n) {
    if (!std::isfinite(phases[n])) throw ContractError("UnitaryOperator::diagonal: non-finite phase");
    m(n, n) = std::polar(1.0, phases[n]);
  }
  return UnitaryOperator(std::move(m), Unchecked{});
}

UnitaryOperator UnitaryOperator::adjoint() const {
  return UnitaryOperator(matrix_.adjoint(), Unchecked{});
}

double UnitaryOperator::unitarity_defect() const {
  const ComplexMatrix gram = matrix_.adjoint() * matrix_;
  return max_abs(gram - ComplexMatrix::Identity(dim(), dim()));
}

UnitaryOperator operator*(const UnitaryOperator& a, const UnitaryOperator& b) {
  if (a.dim() != b.dim()) throw ContractError("UnitaryOperator product: dimension mismatch");
  return UnitaryOperator(a.matrix_ * b.matrix_);
}

StateVector::StateVector(ComplexVector amplitudes, bool normalized)
    : amplitudes_(std::move(amplitudes)), normalized_(normalized) {
  if (amplitudes_.size() == 0) throw ContractError("StateVector: empty amplitude vector");
  if (!amplitudes_.allFinite()) throw ContractError("StateVector: non-finite amplitude");
  if (normalized_ && std::abs(amplitudes_.norm() - 1.0) > Tolerances::state_norm) {
    std::ostringstream os;
    os << "StateVector: norm " << amplitudes_.norm() << " is not 1 within "
       << Tolerances::state_norm;
    throw ContractError(os.str());
  }
}

StateVector StateVector::basis(Eigen::Index dim, Eigen::Index k) {
  if (k < 0 || k >= dim) throw ContractError("StateVector::basis: index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v(k) = 1.0;
  return StateVector(std::move(v));
}

ComplexMatrix EigenphaseDecomposition::reconstruct() const {
  const Eigen::Index dim = vectors.rows();
  Eigen::VectorXcd eig(dim);
  for (Eigen::Index s = 0; s < dim; ++s) eig(s) = std::polar(1.0, phases[s]);
  return vectors * eig.asDiagonal() * vectors.adjoint();
}

UnitaryOperator unitary_from_hermitian(const HermitianOperator& h, double t) {
  if (!std::isfinite(t)) throw ContractError("unitary_from_hermitian: non-finite time");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "unitary_from_hermitian: Hermitian eigensolver failed for dimension " << h.dim();
    throw NumericError(os.str());
  }
  const Eigen::VectorXd& energies = solver.eigenvalues();
  Eigen::VectorXcd phases(energies.size());
  for (Eigen::Index n = 0; n < energies.size(); ++n) phases(n) = std::polar(1.0, -t * energies(n));
  const ComplexMatrix& q = solver.eigenvectors();
  return UnitaryOperator(q * phases.asDiagonal() * q.adjoint());
}

EigenphaseDecomposition eigenphases(const UnitaryOperator& v) {
  Eigen::ComplexSchur<ComplexMatrix> schur(v.matrix(), /*computeU=*/true);
  if (schur.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigenphases: complex Schur iteration did not converge (dimension " << v.dim() << ")";
    throw NumericError(os.str());
  }
  const ComplexMatrix& t = schur.matrixT();
  const Eigen::Index dim = v.dim();
  double off_diagonal = 0.0;
  for (Eigen::Index c = 1; c < dim; ++c)
    for (Eigen::Index r = 0; r < c; ++r) off_diagonal = std::max(off_diagonal, std::abs(t(r, c)));
  if (off_diagonal > Tolerances::reconstruction) {
    std::ostringstream os;
    os << "eigenphases: Schur form is not diagonal (max off-diagonal " << off_diagonal
       << "); input is not normal to working precision";
    throw NumericError(os.str());
  }

  std::vector<double> raw(static_cast<std::size_t>(dim));
  for (Eigen::Index s = 0; s < dim; ++s) raw[s] = wrap_phase(std::arg(t(s, s)));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return raw[a] < raw[b]; });

  EigenphaseDecomposition out;
  out.phases.resize(static_cast<std::size_t>(dim));
  out.vectors.resize(dim, dim);
  const ComplexMatrix& q = schur.matrixU();
  for (Eigen::Index s = 0; s < dim; ++s) {
    out.phases[s] = raw[order[s]];
    out.vectors.col(s) = q.col(order[s]);
  }
  return out;
}

StateVector apply_power(const UnitaryOperator& v, const StateVector& psi, std::size_t n) {
  if (v.dim() != psi.dim()) throw ContractError("apply_power: dimension mismatch");
  ComplexVector x = psi.amplitudes();
  ComplexVector scratch(x.size());
  for (std::size_t k = 0; k < n; ++k) {
    scratch.noalias() = v.matrix() * x;
    x.swap(scratch);
  }
  return StateVector(std::move(x), /*normalized=*/false);
}

double trace_norm(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw ContractError("trace_norm: matrix must be square");
  if (m.size() == 0) return 0.0;
  if (!m.allFinite()) throw ContractError("trace_norm: non-finite entries");
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  if (svd.info() != Eigen::Success) throw NumericError("trace_norm: SVD failed");
  return svd.singularValues().sum();
}

UnitaryOperator random_unitary(Eigen::Index dim, std::mt19937_64& rng) {
  if (dim <= 0) throw ContractError("random_unitary: dimension must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix z(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) z(r, c) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < dim; ++c) {
    const Complex d = r(c, c);
    if (std::abs(d) > 0.0) q.col(c) *= d / std::abs(d);
  }
  return UnitaryOperator(std::move(q));
}

StateVector random_state(Eigen::Index dim, std::mt19937_64& rng) {
  if (dim <= 0) throw ContractError("random_state: dimension must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexVector v(dim);
  for (Eigen::Index n = 0; n < dim; ++n) v(n) = Complex(gauss(rng), gauss(rng));
  v /= v.norm();
  return StateVector(std::move(v));
}

}  // namespace floquetlab
