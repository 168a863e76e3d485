#include "floquetlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "floquetlab/error.hpp"
#include "floquetlab/numtheory.hpp"

namespace floquetlab {

namespace {

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return 0.0;
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
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

DynamicsTrace evolve_trace(const UnitaryOperator& v, const StateVector& psi0,
                           std::span<const double> alphas, std::size_t n_kicks) {
  if (v.dim() != psi0.dim() || static_cast<std::size_t>(v.dim()) != alphas.size())
    throw ContractError("evolve_trace: dimension mismatch");
  if (n_kicks < 1) throw ContractError("evolve_trace: need at least one kick");

  DynamicsTrace trace;
  trace.dim = static_cast<std::size_t>(v.dim());
  trace.energy.reserve(n_kicks + 1);
  trace.populations.reserve(n_kicks + 1);
  trace.norm_drift.reserve(n_kicks + 1);

  ComplexVector x = psi0.amplitudes();
  ComplexVector scratch(x.size());
  std::vector<double> pops(alphas.size()), weighted(alphas.size());
  for (std::size_t n = 0;; ++n) {
    for (std::size_t m = 0; m < alphas.size(); ++m) {
      pops[m] = std::norm(x(static_cast<Eigen::Index>(m)));
      weighted[m] = alphas[m] * pops[m];
    }
    trace.energy.push_back(pairwise_sum(weighted));
    trace.norm_drift.push_back(std::abs(std::sqrt(pairwise_sum(pops)) - 1.0));
    trace.populations.push_back(pops);
    if (n == n_kicks) break;
    scratch.noalias() = v.matrix() * x;
    x.swap(scratch);
  }
  return trace;
}

double transition_prob(const UnitaryOperator& v, std::size_t k, std::size_t l, std::size_t n) {
  const auto d = static_cast<std::size_t>(v.dim());
  if (k >= d || l >= d) throw ContractError("transition_prob: basis index out of range");
  const StateVector evolved = apply_power(v, StateVector::basis(v.dim(), static_cast<Eigen::Index>(l)), n);
  return std::norm(evolved.amplitudes()(static_cast<Eigen::Index>(k)));
}

double transition_prob_spectral(const EigenphaseDecomposition& decomp, std::size_t k,
                                std::size_t l, std::size_t n) {
  const auto d = static_cast<std::size_t>(decomp.vectors.rows());
  if (k >= d || l >= d) throw ContractError("transition_prob_spectral: basis index out of range");
  Complex amp = 0.0;
  const double nn = static_cast<double>(n);
  for (std::size_t s = 0; s < decomp.phases.size(); ++s) {
    const auto col = static_cast<Eigen::Index>(s);
    // e^{i n x} computed from the wrapped phase keeps large n accurate.
    amp += std::polar(1.0, wrap_phase(nn * decomp.phases[s])) *
           decomp.vectors(static_cast<Eigen::Index>(k), col) *
           std::conj(decomp.vectors(static_cast<Eigen::Index>(l), col));
  }
  return std::norm(amp);
}

CesaroSeries cesaro_diagnostics(std::span<const double> p) {
  if (p.empty()) throw ContractError("cesaro_diagnostics: empty series");
  CesaroSeries out;
  out.partial_sums.reserve(p.size());
  out.averages.reserve(p.size());
  double acc = 0.0;
  for (std::size_t m = 0; m < p.size(); ++m) {
    acc += p[m];
    out.partial_sums.push_back(acc);
    out.averages.push_back(acc / static_cast<double>(m + 1));
  }
  std::vector<double> x, ys, ya;
  for (std::size_t m = 0; m < p.size(); ++m) {
    if (out.partial_sums[m] > 0.0 && out.averages[m] > 0.0) {
      x.push_back(static_cast<double>(m + 1));
      ys.push_back(out.partial_sums[m]);
      ya.push_back(out.averages[m]);
    }
  }
  out.sum_slope = log_slope(x, ys);
  out.average_slope = log_slope(x, ya);
  return out;
}

double rage_average(std::span<const std::size_t> support, const UnitaryOperator& v,
                    const StateVector& psi, std::size_t n) {
  if (v.dim() != psi.dim()) throw ContractError("rage_average: dimension mismatch");
  if (n < 1) throw ContractError("rage_average: N must be >= 1");
  for (std::size_t i : support)
    if (i >= static_cast<std::size_t>(v.dim())) throw ContractError("rage_average: projector index out of range");
  ComplexVector x = psi.amplitudes();
  ComplexVector scratch(x.size());
  std::vector<double> terms(n);
  for (std::size_t step = 0; step < n; ++step) {
    double w = 0.0;
    for (std::size_t i : support) w += std::norm(x(static_cast<Eigen::Index>(i)));
    terms[step] = w;
    scratch.noalias() = v.matrix() * x;
    x.swap(scratch);
  }
  return pairwise_sum(terms) / static_cast<double>(n);
}

const char* to_string(GrowthLabel label) {
  switch (label) {
    case GrowthLabel::recurrent:
      return "recurrent";
    case GrowthLabel::diffusive:
      return "diffusive";
    case GrowthLabel::ballistic:
      return "ballistic";
    case GrowthLabel::indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

GrowthClassification classify_growth(const DynamicsTrace& trace, const GrowthBands& bands) {
  const std::size_t kicks = trace.kicks();
  if (kicks < 100) throw ContractError("classify_growth: need at least 100 kicks");

  GrowthClassification out;
  out.dim = trace.dim;
  out.heisenberg_time = trace.dim;
  out.fit_end = trace.dim > 0 ? std::min(kicks, std::max<std::size_t>(trace.dim / 2, 2)) : kicks;

  const double e0 = trace.energy.front();
  std::vector<double> envelope(kicks + 1, 0.0);
  for (std::size_t n = 1; n <= kicks; ++n)
    envelope[n] = std::max(envelope[n - 1], std::abs(trace.energy[n] - e0));

  const double scale = std::max(std::abs(e0), envelope.back());
  if (envelope.back() <= 1e-12 * std::max(scale, 1e-300) || envelope.back() == 0.0) {
    out.label = GrowthLabel::recurrent;
    out.slope = 0.0;
    out.bounded = true;
    out.envelope_ratio = 1.0;
    return out;
  }

  std::vector<double> x, y;
  for (std::size_t n = 1; n <= out.fit_end; ++n) {
    if (envelope[n] > 0.0) {
      x.push_back(static_cast<double>(n));
      y.push_back(envelope[n]);
    }
  }
  out.slope = log_slope(x, y);

  std::vector<double> tail(envelope.begin() + 1, envelope.end());
  const double med = median(tail);
  out.envelope_ratio = med > 0.0 ? envelope.back() / med : std::numeric_limits<double>::infinity();
  out.bounded = out.envelope_ratio <= bands.bounded_ratio;

  if (out.bounded || out.slope <= bands.recurrent_max)
    out.label = GrowthLabel::recurrent;
  else if (out.slope >= bands.diffusive_min && out.slope <= bands.diffusive_max)
    out.label = GrowthLabel::diffusive;
  else if (out.slope >= bands.ballistic_min)
    out.label = GrowthLabel::ballistic;
  else
    out.label = GrowthLabel::indeterminate;
  return out;
}

}  // namespace floquetlab
