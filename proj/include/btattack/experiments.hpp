#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "btattack/attacks.hpp"
#include "btattack/core.hpp"
#include "btattack/data.hpp"

namespace btattack {

enum class SuccessCriterion {
  // Final distance 0.
  kExact,
  // Final distance below the initial one.
  kImproved,
};

SuccessCriterion parse_criterion(std::string_view name);
std::string_view criterion_name(SuccessCriterion criterion);

// How the adversarial target is derived from a trial's initial ranking.
struct TargetSpec {
  enum class Kind {
    // Use `fixed` as is.
    kFixed,
    // Move the candidate at 0-based rank `promote` to the top.
    kPromote,
    // Reverse the initial ranking.
    kReverse,
  };
  Kind kind = Kind::kPromote;
  std::optional<Ranking> fixed;
  std::size_t promote = 2;

  Ranking resolve(const Ranking& initial) const;
};

// Mixes a base seed with a stream tag and an index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

// k = ceil(fraction * pool_size).
std::size_t budget_for_fraction(double fraction, std::size_t pool_size);

struct SweepSpec {
  // Per-trial synthetic electorates, or one fixed dataset for all trials.
  std::optional<SyntheticSpec> synthetic;
  std::optional<ComparisonDataset> dataset;

  std::vector<Algorithm> algorithms{Algorithm::kRandomFlip, Algorithm::kGreedyFlip,
                                    Algorithm::kRsa, Algorithm::kAssa};
  std::vector<double> budget_fractions{0.01, 0.05, 0.10, 0.20};
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  TargetSpec target;
  // 0 means every voter; otherwise a random coalition of this size per trial.
  std::size_t coalition_size = 0;
  // Attack hyperparameters; target, budget, coalition and seed are filled in
  // per trial.
  AttackConfig attack;
  SuccessCriterion criterion = SuccessCriterion::kExact;
  // Worker threads; 0 picks the hardware concurrency.
  std::size_t jobs = 1;
  // Measure wall time. Timings are the only non-reproducible output.
  bool record_timing = true;

  void validate() const;
};

struct TrialResult {
  Algorithm algorithm = Algorithm::kAssa;
  double budget_fraction = 0.0;
  std::size_t subsets = 1;
  std::size_t iterations = 1;
  std::size_t trial = 0;
  std::uint64_t data_seed = 0;
  std::uint64_t attack_seed = 0;
  std::size_t budget = 0;
  std::size_t initial_distance = 0;
  std::size_t final_distance = 0;
  std::size_t flips = 0;
  // initial rank - final rank of the target's top candidate; positive = climbed.
  long rank_shift = 0;
  double seconds = 0.0;

  bool operator==(const TrialResult&) const = default;
};

struct CellResult {
  Algorithm algorithm = Algorithm::kAssa;
  double budget_fraction = 0.0;
  std::size_t subsets = 1;
  std::size_t iterations = 1;
  std::size_t trials = 0;
  double mean_final_kd = 0.0;
  double min_final_kd = 0.0;
  double max_final_kd = 0.0;
  double mean_reduction = 0.0;
  double mean_rank_shift = 0.0;
  double success_rate = 0.0;
  double mean_flips = 0.0;
  double seconds = 0.0;

  bool operator==(const CellResult&) const = default;
};

struct SweepTable {
  std::vector<CellResult> cells;
  // Every trial, ordered by (algorithm, axis value, fraction, trial).
  std::vector<TrialResult> trials;

  bool operator==(const SweepTable&) const = default;
};

double success_rate(std::span<const TrialResult> trials,
                    SuccessCriterion criterion = SuccessCriterion::kExact);
bool trial_succeeded(const TrialResult& trial, SuccessCriterion criterion);

// Aggregates trials that share one (algorithm, fraction, subsets, iterations).
CellResult summarize(std::span<const TrialResult> trials, SuccessCriterion criterion);

// One cell per (algorithm, fraction); trials of a cell use paired seeds across
// algorithms and fractions.
SweepTable budget_sweep(const SweepSpec& spec);

enum class SweepAxis { kSubsets, kIterations };
SweepAxis parse_axis(std::string_view name);
std::string_view axis_name(SweepAxis axis);

// One cell per (algorithm, axis value, fraction).
SweepTable hyperparameter_sweep(SweepAxis axis, std::span<const std::size_t> values,
                                const SweepSpec& spec);

using CoalitionSampler =
    std::function<std::vector<VoterIndex>(std::size_t size, std::mt19937_64& rng)>;

// Uniform random coalitions of `num_voters` voters.
CoalitionSampler uniform_coalitions(std::size_t num_voters);

struct ThresholdProbe {
  std::size_t size = 0;
  std::size_t successes = 0;
  std::size_t trials = 0;

  bool operator==(const ThresholdProbe&) const = default;
};

struct ThresholdResult {
  // False when even the full electorate with an unlimited budget cannot reach
  // the target.
  bool reachable = false;
  std::size_t initial_distance = 0;
  std::size_t threshold = 0;
  double fraction = 0.0;
  std::vector<ThresholdProbe> probes;

  bool operator==(const ThresholdResult&) const = default;
};

struct ThresholdSpec {
  Algorithm algorithm = Algorithm::kAssa;
  // Hyperparameters and target; budget and coalition are set per probe.
  AttackConfig attack;
  // Sampled coalitions per probed size.
  std::size_t trials = 5;
  std::uint64_t seed = 0;
  CoalitionSampler sampler;
};

// Smallest coalition size s such that at least half of the sampled size-s
// coalitions reach the target exactly with budget = their whole pool, found
// by binary search over 1..num_voters.
ThresholdResult collusion_threshold(const ComparisonDataset& dataset,
                                    const ThresholdSpec& spec);

// Column names of the CSV table, in order.
std::vector<std::string> csv_columns(bool with_hyperparameters = false);
// Header plus one row per cell. With hyperparameters, subsets and iterations
// are appended as two extra columns.
void write_csv(std::span<const CellResult> cells, std::ostream& out,
               bool with_hyperparameters = false);

inline constexpr int kResultsSchemaVersion = 1;
std::string table_to_json(const SweepTable& table);
SweepTable table_from_json(std::string_view text);

// Runs `count` independent jobs on up to `jobs` threads. Each job writes only
// its own output slot, so results do not depend on scheduling.
void run_jobs(std::size_t count, std::size_t jobs,
              const std::function<void(std::size_t)>& job);

}  // namespace btattack
