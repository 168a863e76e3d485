#pragma once

// Stroboscopic dynamics: energy traces, transition probabilities, Cesaro and
// RAGE-type time averages, and a growth-regime classifier.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "floquetlab/opcore.hpp"

namespace floquetlab {

struct DynamicsTrace {
  std::size_t dim = 0;                           // truncation D; 0 if unknown
  std::vector<double> energy;                    // E(n), n = 0..n_kicks
  std::vector<std::vector<double>> populations;  // |<phi_m|V^n psi0>|^2
  std::vector<double> norm_drift;                // | |V^n psi0| - 1 |

  std::size_t kicks() const noexcept { return energy.empty() ? 0 : energy.size() - 1; }
};

DynamicsTrace evolve_trace(const UnitaryOperator& v, const StateVector& psi0,
                           std::span<const double> alphas, std::size_t n_kicks);

// |<phi_k|V^n|phi_l>|^2 by repeated application.
double transition_prob(const UnitaryOperator& v, std::size_t k, std::size_t l, std::size_t n);

// Same quantity from the spectral decomposition,
// sum_s e^{i n x_s} <k|v_s><v_s|l>.
double transition_prob_spectral(const EigenphaseDecomposition& decomp, std::size_t k,
                                std::size_t l, std::size_t n);

struct CesaroSeries {
  std::vector<double> partial_sums;  // sum_{n<M} p(n), M = 1..len
  std::vector<double> averages;      // partial_sums[M-1] / M
  double sum_slope = 0.0;            // log-log slope of the partial sums
  double average_slope = 0.0;        // log-log slope of the averages
};

CesaroSeries cesaro_diagnostics(std::span<const double> p);

// (1/N) sum_{n=0}^{N-1} |C V^n psi|^2 for the coordinate projector C onto
// `support` (H0 basis indices).
double rage_average(std::span<const std::size_t> support, const UnitaryOperator& v,
                    const StateVector& psi, std::size_t n);

enum class GrowthLabel { recurrent, diffusive, ballistic, indeterminate };

const char* to_string(GrowthLabel label);

// Slope bands for the log-log growth of the energy envelope.
struct GrowthBands {
  double recurrent_max = 0.15;
  double diffusive_min = 0.7;
  double diffusive_max = 1.3;
  double ballistic_min = 1.7;
  // The envelope counts as bounded when max/median over the trace is below this.
  double bounded_ratio = 1.25;
};

struct GrowthClassification {
  GrowthLabel label = GrowthLabel::indeterminate;
  double slope = 0.0;
  bool bounded = false;
  std::size_t dim = 0;             // truncation D of the trace
  std::size_t heisenberg_time = 0; // n* ~ D; 0 when D is unknown
  std::size_t fit_end = 0;         // last kick used in the fit
  double envelope_ratio = 0.0;
};

// Fits the running maximum of |E(n) - E(0)| over 1 <= n <= n*/2 (whole trace
// when the dimension is unknown). A bounded envelope is labelled recurrent
// whatever the early slope. Requires >= 100 kicks.
GrowthClassification classify_growth(const DynamicsTrace& trace, const GrowthBands& bands = {});

}  // namespace floquetlab
