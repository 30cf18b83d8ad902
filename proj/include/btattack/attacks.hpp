#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "btattack/core.hpp"
#include "btattack/mle.hpp"

namespace btattack {

enum class Algorithm {
  kRandomFlip,
  kGreedyFlip,
  kRsa,
  kAssa,
};

// "RF", "GF", "RSA", "ASSA" (case-insensitive on parse).
std::string_view algorithm_name(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

struct AttackConfig {
  // Adversarial target ranking, best first.
  Ranking target = Ranking::identity(2);
  // Maximum number of net flips.
  std::size_t budget = 0;
  // Voters whose comparisons may be flipped. Must be non-empty.
  std::vector<VoterIndex> coalition;
  std::uint64_t seed = 0;
  // Number of subsets b each pool is split into (RSA, ASSA).
  std::size_t subsets = 1;
  // RSA rounds n, or ASSA rounds T.
  std::size_t iterations = 1;
  FitConfig fit;

  // Refit every tentative dataset starting from the incumbent strengths
  // instead of the uniform vector.
  bool warm_start = false;
  // A subset that would push the flip count past the budget is cut down to
  // fit: positions that undo earlier flips first, then new flips in subset
  // order. When false such subsets are skipped.
  bool truncate_subsets = true;
  // ASSA: when no subset of a round improves, start the next round from the
  // whole coalition pool again instead of stopping.
  bool assa_restart = true;
  // ASSA: stop as soon as the flip count reaches the budget.
  bool assa_stop_at_budget = false;
  // RSA, ASSA: after shuffling, order each pool by predicted first-order gain
  // toward the target (largest first) before partitioning.
  bool influence_ordering = false;

  // Checks the config against the dataset it will attack.
  void validate(const ComparisonDataset& dataset) const;
};

// Every coalition voter index in `dataset`. Convenience for full coalitions.
std::vector<VoterIndex> all_voters(const ComparisonDataset& dataset);

// Distance reported for a tentative dataset whose strengths are not
// identifiable. Such states are never accepted.
inline constexpr std::size_t kNonIdentifiable = static_cast<std::size_t>(-1);

struct Checkpoint {
  // 0 for the initial state, otherwise the step / round that produced it.
  std::size_t round = 0;
  FlipSet flips;
  // Kendall distance of the fitted ranking to the target.
  std::size_t distance = 0;
  // False for a state that was evaluated and then discarded (random flip).
  bool accepted = true;

  bool operator==(const Checkpoint&) const = default;
};

struct RoundStats {
  // Size of the pool that was partitioned.
  std::size_t pool_size = 0;
  // The pool was reset to the whole coalition pool for this round.
  bool restarted = false;
  // Subsets whose flips improved on the previous state.
  std::size_t improving_subsets = 0;

  bool operator==(const RoundStats&) const = default;
};

struct AttackResult {
  FlipSet flips;
  ComparisonDataset manipulated;
  std::vector<Checkpoint> trajectory;
  std::size_t initial_distance = 0;
  std::size_t final_distance = 0;
  // Greedy steps, or partition rounds for RSA and ASSA.
  std::size_t rounds = 0;
  // Number of tentative MLE refits.
  std::size_t refits = 0;
  // Per-round pool bookkeeping (RSA and ASSA).
  std::vector<RoundStats> round_stats;

  bool operator==(const AttackResult&) const = default;
};

// Positions of the comparisons cast by a coalition voter, in dataset order.
// Throws IndexError for a voter index outside the dataset.
std::vector<Position> coalition_pool(const ComparisonDataset& dataset,
                                     std::span<const VoterIndex> coalition);

// Flips a uniformly random subset of min(budget, |pool|) pool positions. A
// result farther from the target than the original is reverted; the attempt
// stays visible in the trajectory.
AttackResult random_flip(const ComparisonDataset& dataset, const AttackConfig& config);

// Repeatedly commits the single unflipped position whose flip lowers the
// distance the most (ties to the lowest position), until the budget is spent
// or nothing improves.
AttackResult greedy_flip(const ComparisonDataset& dataset, const AttackConfig& config);

// Randomized subset attack: every round shuffles the pool into `subsets`
// chunks and tries them in order on top of the current state, keeping each
// one that lowers the distance.
AttackResult rsa(const ComparisonDataset& dataset, const AttackConfig& config);

// Adaptive search-space pruning: every round partitions the current pool,
// scores each chunk against the previous round's state, commits the best
// improving chunk and shrinks the pool to the union of improving chunks.
AttackResult assa(const ComparisonDataset& dataset, const AttackConfig& config);

AttackResult run_attack(Algorithm algorithm, const ComparisonDataset& dataset,
                        const AttackConfig& config);

// Distance of the freshly fitted ranking of `dataset` to `target`, or
// kNonIdentifiable when the fit does not exist.
std::size_t fitted_distance(const ComparisonDataset& dataset, const Ranking& target,
                            const FitConfig& fit_config = {});

}  // namespace btattack
