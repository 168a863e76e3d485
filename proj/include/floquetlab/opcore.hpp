#pragma once

// Dense complex operators: Hermitian generators, unitary propagators, state
// vectors and the eigenphase decomposition of unitaries.
//
// Phase convention: a unitary eigenvalue is written e^{ix} with x in [0, 2pi).

#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace floquetlab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Every tolerance used by operator validation, in one place.
struct Tolerances {
  static constexpr double hermitian = 1e-12;       // max |M - M^dagger|
  static constexpr double unitary = 1e-10;         // max |M^dagger M - I|
  static constexpr double state_norm = 1e-12;      // | |psi| - 1 |
  static constexpr double reconstruction = 1e-9;   // eigenphase round trip
  static constexpr double orthonormal = 1e-10;     // eigenvector columns
  static constexpr double norm_drift_per_step = 1e-10;
  static constexpr double singular_point = 1e-9;   // distance to a pole
};

// Largest entry modulus.
double max_abs(const ComplexMatrix& m);

// Maps any real angle onto [0, 2pi).
double wrap_phase(double x);

class HermitianOperator {
 public:
  // Throws ContractError if the matrix is not square, has non-finite entries,
  // or deviates from its adjoint by more than Tolerances::hermitian.
  explicit HermitianOperator(ComplexMatrix matrix);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

 private:
  ComplexMatrix matrix_;
};

class UnitaryOperator {
 public:
  // Throws ContractError unless max|M^dagger M - I| <= Tolerances::unitary.
  explicit UnitaryOperator(ComplexMatrix matrix);

  static UnitaryOperator identity(Eigen::Index dim);
  // diag(e^{i phases_n})
  static UnitaryOperator diagonal(std::span<const double> phases);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

  UnitaryOperator adjoint() const;
  double unitarity_defect() const;

  friend UnitaryOperator operator*(const UnitaryOperator& a, const UnitaryOperator& b);

 private:
  struct Unchecked {};
  UnitaryOperator(ComplexMatrix matrix, Unchecked) : matrix_(std::move(matrix)) {}

  ComplexMatrix matrix_;
};

class StateVector {
 public:
  // With `normalized` set the amplitudes must have unit norm within
  // Tolerances::state_norm.
  explicit StateVector(ComplexVector amplitudes, bool normalized = true);

  // Unit vector |k> of the computational (H0) basis.
  static StateVector basis(Eigen::Index dim, Eigen::Index k);

  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }
  double norm() const { return amplitudes_.norm(); }
  bool normalized() const noexcept { return normalized_; }

 private:
  ComplexVector amplitudes_;
  bool normalized_;
};

struct EigenphaseDecomposition {
  std::vector<double> phases;  // ascending, in [0, 2pi)
  ComplexMatrix vectors;       // column s belongs to phases[s]

  // sum_s e^{i x_s} |v_s><v_s|
  ComplexMatrix reconstruct() const;
};

// exp(-i t H) through the Hermitian eigendecomposition of H.
UnitaryOperator unitary_from_hermitian(const HermitianOperator& h, double t);

// Eigenphases of a unitary via the complex Schur form. For a normal matrix the
// Schur vectors are an orthonormal eigenbasis even for clustered eigenvalues.
EigenphaseDecomposition eigenphases(const UnitaryOperator& v);

// V^n psi by repeated application.
StateVector apply_power(const UnitaryOperator& v, const StateVector& psi, std::size_t n);

// Sum of singular values.
double trace_norm(const ComplexMatrix& m);

// Haar-distributed unitary (QR of a complex Ginibre matrix with phase fix).
UnitaryOperator random_unitary(Eigen::Index dim, std::mt19937_64& rng);

// Normalized state with i.i.d. complex Gaussian amplitudes.
StateVector random_state(Eigen::Index dim, std::mt19937_64& rng);

}  // namespace floquetlab
