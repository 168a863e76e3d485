#pragma once

// Model builders: rank-N delta-kicked Hamiltonians
//
//   H(t) = H0 + (sum_k lambda_k |psi_k><psi_k|) sum_m delta(t - mT),
//
// with H0 diagonal, alpha_n = hbar * sum_j beta_j n^j, and the spin-1 kicked top.

#include <cstddef>
#include <vector>

#include "floquetlab/opcore.hpp"

namespace floquetlab {

class EigenvaluePolynomial {
 public:
  // Coefficients beta_0..beta_p in angular-frequency units. Trailing zeros
  // are trimmed; what remains must have degree p >= 1.
  explicit EigenvaluePolynomial(std::vector<double> beta);

  std::size_t degree() const noexcept { return beta_.size() - 1; }
  const std::vector<double>& coefficients() const noexcept { return beta_; }

  // sum_j beta_j n^j (Horner).
  double operator()(double n) const;

 private:
  std::vector<double> beta_;
};

// One kick direction |psi_k> = sum_n a_n |phi_n>, |a_n| = c n^{-gamma} on the
// residue class n = offset (mod stride), n >= 1.
struct PerturbationVector {
  double gamma = 0.0;
  std::size_t offset = 0;
  std::size_t stride = 1;
  ComplexVector coefficients;  // indexed by H0 basis, length = truncation D
  double scale = 0.0;          // c, fixed by unit norm

  Eigen::Index dim() const noexcept { return coefficients.size(); }
  // P = |psi><psi|
  ComplexMatrix projector() const;
};

enum class KickOrdering {
  kick_after_free,   // V = K U: free evolution over one period, then the kick
  kick_before_free,  // V = U K
};

struct KickedSystemSpec {
  std::size_t dim = 0;
  EigenvaluePolynomial poly{{0.0, 1.0}};
  double period = 1.0;
  double hbar = 1.0;
  std::vector<double> strengths;             // lambda_k
  std::vector<PerturbationVector> vectors;   // psi_k, same length as strengths
  KickOrdering ordering = KickOrdering::kick_after_free;
  int kick_sign = -1;                        // K = exp(kick_sign * i/hbar * sum lambda_k P_k)

  // Throws ContractError on mismatched sizes, rank > dim, non-unit or
  // non-orthogonal kick vectors (tolerance 1e-12).
  void validate() const;
};

struct EigenphaseSequence {
  std::vector<double> theta;  // in [0, 2pi)

  std::size_t size() const noexcept { return theta.size(); }
  double operator[](std::size_t n) const { return theta[n]; }
};

// alpha_n = hbar * poly(n), n = 0..dim-1.
std::vector<double> h0_eigenvalues(const EigenvaluePolynomial& poly, double hbar, std::size_t dim);

// theta_n = 2pi * frac(alpha_n T / (2 pi hbar)).
EigenphaseSequence eigenphase_sequence(const std::vector<double>& alphas, double period,
                                       double hbar);

// N mutually orthogonal unit vectors with interleaved residue-class supports.
// Requires gamma > 0 and 1 <= N <= dim/2.
std::vector<PerturbationVector> build_perturbation_vectors(double gamma, std::size_t dim,
                                                           std::size_t rank);

// U = diag(e^{-i alpha_n T / hbar})
UnitaryOperator free_evolution(const KickedSystemSpec& spec);

// Closed form K = I + sum_k (e^{kick_sign i lambda_k/hbar} - 1) P_k.
UnitaryOperator kick_operator(const KickedSystemSpec& spec);

// Dense reference for the kick: exp(kick_sign i/hbar sum lambda_k P_k) via the
// Hermitian eigendecomposition.
UnitaryOperator kick_operator_dense(const KickedSystemSpec& spec);

UnitaryOperator build_floquet(const KickedSystemSpec& spec);

// R_k with V - U = sum_k R_k; (K - I) splits into rank-one pieces
// mu_k P_k, placed to the left or right of U according to the ordering.
std::vector<ComplexMatrix> kick_residuals(const KickedSystemSpec& spec);

// Convenience for the harmonic-oscillator-type spectrum used throughout:
// rank-N kicks with equal strength on vectors of decay exponent gamma.
KickedSystemSpec make_kicked_system(EigenvaluePolynomial poly, std::size_t dim, double gamma,
                                    std::size_t rank, double strength, double period = 1.0,
                                    double hbar = 1.0);

namespace spin1 {

// (J_i)_{lm} = -i eps_{ilm} with hbar = 1.
ComplexMatrix jx();
ComplexMatrix jy();
ComplexMatrix jz();
// Gell-Mann lambda_2, lambda_7, lambda_8.
ComplexMatrix gell_mann(int index);

}  // namespace spin1

// V = e^{-i c1 lambda_7 T} e^{-i c3} e^{-i c4 lambda_8}. The global phase c3
// defaults to zero (it is dropped in the model).
UnitaryOperator build_kicked_top_spin1(double c1, double c4, double period, double c3 = 0.0);

}  // namespace floquetlab
