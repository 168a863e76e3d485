#pragma once

#include <algorithm>
#include <random>

#include "floquetlab/kicked.hpp"

namespace floquetlab::testing {

// Random rank-N system: D in [8, max_dim], N in [1, min(max_rank, D/2)].
inline KickedSystemSpec random_spec(std::mt19937_64& rng, std::size_t max_dim = 256,
                                    std::size_t max_rank = 4) {
  std::uniform_int_distribution<std::size_t> dim_dist(8, max_dim);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t dim = dim_dist(rng);
  std::uniform_int_distribution<std::size_t> rank_dist(1, std::min(max_rank, dim / 2));
  const std::size_t rank = rank_dist(rng);

  std::vector<double> beta{unit(rng), 0.5 + 2.0 * unit(rng)};
  if (unit(rng) < 0.5) beta.push_back(0.1 * unit(rng));

  KickedSystemSpec spec;
  spec.dim = dim;
  spec.poly = EigenvaluePolynomial(beta);
  spec.period = 0.5 + unit(rng);
  spec.hbar = 0.5 + unit(rng);
  spec.vectors = build_perturbation_vectors(0.55 + 1.5 * unit(rng), dim, rank);
  for (std::size_t k = 0; k < rank; ++k) spec.strengths.push_back(0.1 + 3.0 * unit(rng));
  spec.ordering = unit(rng) < 0.5 ? KickOrdering::kick_after_free : KickOrdering::kick_before_free;
  spec.kick_sign = unit(rng) < 0.5 ? -1 : 1;
  return spec;
}

}  // namespace floquetlab::testing
