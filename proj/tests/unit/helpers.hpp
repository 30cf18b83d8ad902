#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "btattack/core.hpp"
#include "btattack/data.hpp"
#include "btattack/mle.hpp"

namespace btattack::testing {

inline CountMatrix random_counts(std::size_t m, std::int64_t max_count, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> count(0, max_count);
  CountMatrix c(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) c.add(i, j, count(rng));
    }
  }
  return c;
}

inline CountMatrix random_connected_counts(std::size_t m, std::int64_t max_count,
                                           std::mt19937_64& rng) {
  while (true) {
    auto c = random_counts(m, max_count, rng);
    if (check_connectivity(c).strongly_connected) return c;
  }
}

inline ComparisonDataset random_dataset(std::mt19937_64& rng, std::size_t m,
                                        std::size_t voters, std::size_t per_voter) {
  SyntheticSpec spec;
  spec.m = m;
  spec.n_voters = voters;
  spec.comparisons_per_voter = per_voter;
  spec.seed = rng();
  return generate_synthetic(spec).dataset;
}

inline ComparisonDataset random_identifiable_dataset(std::mt19937_64& rng, std::size_t m,
                                                     std::size_t voters,
                                                     std::size_t per_voter) {
  while (true) {
    auto d = random_dataset(rng, m, voters, per_voter);
    if (check_connectivity(aggregate(d)).strongly_connected) return d;
  }
}

inline Ranking random_ranking(std::size_t m, std::mt19937_64& rng) {
  std::vector<CandidateIndex> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  return Ranking(order);
}

// O(m^2) discordant pair count.
inline std::size_t brute_kendall(const Ranking& a, const Ranking& b) {
  std::size_t d = 0;
  for (CandidateIndex i = 0; i < a.size(); ++i) {
    for (CandidateIndex j = i + 1; j < a.size(); ++j) {
      const bool in_a = a.position_of(i) < a.position_of(j);
      const bool in_b = b.position_of(i) < b.position_of(j);
      if (in_a != in_b) ++d;
    }
  }
  return d;
}

}  // namespace btattack::testing
