#include "btattack/attacks.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <random>
#include <string>

#include "btattack/errors.hpp"
#include "btattack/influence.hpp"

namespace btattack {

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kRandomFlip: return "RF";
    case Algorithm::kGreedyFlip: return "GF";
    case Algorithm::kRsa: return "RSA";
    case Algorithm::kAssa: return "ASSA";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string upper(name);
  for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (upper == "RF") return Algorithm::kRandomFlip;
  if (upper == "GF") return Algorithm::kGreedyFlip;
  if (upper == "RSA") return Algorithm::kRsa;
  if (upper == "ASSA") return Algorithm::kAssa;
  throw DomainError("unknown algorithm '" + std::string(name) +
                    "' (expected RF, GF, RSA or ASSA)");
}

void AttackConfig::validate(const ComparisonDataset& dataset) const {
  if (target.size() != dataset.num_candidates()) {
    throw DimensionError("target ranks " + std::to_string(target.size()) +
                         " candidates but the dataset has " +
                         std::to_string(dataset.num_candidates()));
  }
  if (subsets < 1) throw DomainError("subsets must be at least 1");
  if (iterations < 1) throw DomainError("iterations must be at least 1");
  if (coalition.empty()) throw DomainError("coalition must not be empty");
  fit.validate();
}

std::vector<VoterIndex> all_voters(const ComparisonDataset& dataset) {
  std::vector<VoterIndex> voters(dataset.num_voters());
  for (std::size_t v = 0; v < voters.size(); ++v) voters[v] = static_cast<VoterIndex>(v);
  return voters;
}

std::vector<Position> coalition_pool(const ComparisonDataset& dataset,
                                     std::span<const VoterIndex> coalition) {
  std::vector<bool> member(dataset.num_voters(), false);
  for (VoterIndex v : coalition) {
    if (v >= dataset.num_voters()) {
      throw IndexError("coalition voter " + std::to_string(v) +
                       " does not exist (dataset has " +
                       std::to_string(dataset.num_voters()) + " voters)");
    }
    member[v] = true;
  }
  std::vector<Position> pool;
  for (Position pos = 0; pos < dataset.size(); ++pos) {
    if (member[dataset[pos].voter]) pool.push_back(pos);
  }
  return pool;
}

std::size_t fitted_distance(const ComparisonDataset& dataset, const Ranking& target,
                            const FitConfig& fit_config) {
  try {
    const auto result = fit(aggregate(dataset), fit_config);
    return kendall_tau(target, ranking_from_strengths(result.strengths));
  } catch (const NonIdentifiableError&) {
    return kNonIdentifiable;
  }
}

namespace {

// Fits flipped versions of one dataset and measures their distance to the
// target. Only the count matrix is rebuilt per evaluation.
class Evaluator {
 public:
  struct Outcome {
    std::size_t distance = kNonIdentifiable;
    std::optional<StrengthVector> strengths;
  };

  Evaluator(const ComparisonDataset& dataset, const AttackConfig& config)
      : dataset_(dataset), config_(config), base_(aggregate(dataset)) {
    auto initial = fit(base_, config.fit);
    initial_ = {kendall_tau(config.target, ranking_from_strengths(initial.strengths)),
                std::move(initial.strengths)};
    incumbent_ = initial_;
  }

  const Outcome& initial() const { return initial_; }
  const Outcome& incumbent() const { return incumbent_; }
  std::size_t refits() const { return refits_; }

  CountMatrix counts(const FlipSet& flips) const {
    CountMatrix counts = base_;
    for (Position pos : flips.positions()) {
      const auto& c = dataset_[pos];
      counts.add(c.winner, c.loser, -1);
      counts.add(c.loser, c.winner, 1);
    }
    return counts;
  }

  Outcome evaluate(const FlipSet& flips) {
    ++refits_;
    const auto c = counts(flips);
    try {
      auto result = config_.warm_start ? fit(c, config_.fit, *incumbent_.strengths)
                                       : fit(c, config_.fit);
      return {kendall_tau(config_.target, ranking_from_strengths(result.strengths)),
              std::move(result.strengths)};
    } catch (const NonIdentifiableError&) {
      return {};
    }
  }

  void accept(Outcome outcome) { incumbent_ = std::move(outcome); }

 private:
  const ComparisonDataset& dataset_;
  const AttackConfig& config_;
  CountMatrix base_;
  Outcome initial_;
  Outcome incumbent_;
  std::size_t refits_ = 0;
};

struct Attack {
  const ComparisonDataset& dataset;
  const AttackConfig& config;
  std::vector<Position> pool;
  Evaluator eval;
  std::mt19937_64 rng;
  AttackResult result;

  Attack(const ComparisonDataset& d, const AttackConfig& c)
      : dataset(d),
        config((c.validate(d), c)),
        pool(coalition_pool(d, c.coalition)),
        eval(d, c),
        rng(c.seed),
        result{FlipSet(), d, {}, 0, 0, 0, 0, {}} {
    result.initial_distance = result.final_distance = eval.initial().distance;
    result.trajectory.push_back({0, FlipSet(), result.initial_distance, true});
  }

  std::size_t distance() const { return result.final_distance; }

  void commit(std::size_t round, FlipSet flips, Evaluator::Outcome outcome) {
    result.final_distance = outcome.distance;
    result.trajectory.push_back({round, flips, outcome.distance, true});
    result.flips = std::move(flips);
    eval.accept(std::move(outcome));
  }

  AttackResult finish() {
    result.refits = eval.refits();
    result.manipulated = flip(dataset, result.flips);
    return std::move(result);
  }

  // Shuffled pool cut into min(b, |pool|) contiguous chunks whose sizes
  // differ by at most one.
  std::vector<std::vector<Position>> partition(std::vector<Position> items,
                                               const FlipSet& state) {
    std::vector<std::vector<Position>> chunks;
    if (items.empty()) return chunks;
    std::shuffle(items.begin(), items.end(), rng);
    if (config.influence_ordering) order_by_influence(items, state);
    const std::size_t count = std::min(config.subsets, items.size());
    const std::size_t base = items.size() / count;
    const std::size_t extra = items.size() % count;
    auto it = items.begin();
    for (std::size_t j = 0; j < count; ++j) {
      const auto len = static_cast<std::ptrdiff_t>(base + (j < extra ? 1 : 0));
      chunks.emplace_back(it, it + len);
      it += len;
    }
    return chunks;
  }

  // Highest predicted gain first: a flip raises its current loser relative to
  // its current winner, which helps exactly when the target prefers the loser.
  void order_by_influence(std::vector<Position>& items, const FlipSet& state) {
    const InfluenceModel model(eval.counts(state), *eval.incumbent().strengths);
    std::vector<std::pair<double, Position>> scored;
    scored.reserve(items.size());
    for (Position pos : items) {
      auto winner = dataset[pos].winner;
      auto loser = dataset[pos].loser;
      if (state.contains(pos)) std::swap(winner, loser);
      const auto d = model.single_flip(winner, loser);
      const double gain = d[loser] - d[winner];
      const bool wanted =
          config.target.position_of(loser) < config.target.position_of(winner);
      scored.emplace_back(wanted ? gain : -gain, pos);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; i < items.size(); ++i) items[i] = scored[i].second;
  }

  // The part of `chunk` that can be toggled on top of `state` within budget.
  // Empty when nothing fits.
  std::vector<Position> within_budget(const FlipSet& state,
                                      const std::vector<Position>& chunk) const {
    if (!config.truncate_subsets) {
      if (state.symmetric_difference_size(chunk) > config.budget) return {};
      return chunk;
    }
    std::vector<Position> applied;
    std::size_t size = state.size();
    for (Position pos : chunk) {
      if (state.contains(pos)) {
        applied.push_back(pos);
        --size;
      }
    }
    for (Position pos : chunk) {
      if (!state.contains(pos) && size < config.budget) {
        applied.push_back(pos);
        ++size;
      }
    }
    return applied;
  }
};

}  // namespace

AttackResult random_flip(const ComparisonDataset& dataset, const AttackConfig& config) {
  Attack a(dataset, config);
  auto picked = a.pool;
  std::shuffle(picked.begin(), picked.end(), a.rng);
  picked.resize(std::min(config.budget, picked.size()));
  if (picked.empty()) return a.finish();

  FlipSet attempt(std::move(picked));
  auto outcome = a.eval.evaluate(attempt);
  a.result.rounds = 1;
  if (outcome.distance <= a.distance()) {
    a.commit(1, std::move(attempt), std::move(outcome));
  } else {
    a.result.trajectory.push_back({1, std::move(attempt), outcome.distance, false});
  }
  return a.finish();
}

AttackResult greedy_flip(const ComparisonDataset& dataset, const AttackConfig& config) {
  Attack a(dataset, config);
  while (a.distance() > 0 && a.result.flips.size() < config.budget) {
    std::optional<Position> best;
    Evaluator::Outcome best_outcome;
    best_outcome.distance = a.distance();
    for (Position pos : a.pool) {
      if (a.result.flips.contains(pos)) continue;
      const Position one[] = {pos};
      auto outcome = a.eval.evaluate(a.result.flips.symmetric_difference(one));
      if (outcome.distance < best_outcome.distance) {
        best = pos;
        best_outcome = std::move(outcome);
      }
    }
    if (!best) break;
    ++a.result.rounds;
    const Position one[] = {*best};
    a.commit(a.result.rounds, a.result.flips.symmetric_difference(one),
             std::move(best_outcome));
  }
  return a.finish();
}

AttackResult rsa(const ComparisonDataset& dataset, const AttackConfig& config) {
  Attack a(dataset, config);
  for (std::size_t round = 1; round <= config.iterations && a.distance() > 0; ++round) {
    a.result.rounds = round;
    RoundStats stats{a.pool.size(), false, 0};
    for (const auto& chunk : a.partition(a.pool, a.result.flips)) {
      const auto applied = a.within_budget(a.result.flips, chunk);
      if (applied.empty()) continue;
      auto tentative = a.result.flips.symmetric_difference(applied);
      auto outcome = a.eval.evaluate(tentative);
      if (outcome.distance < a.distance()) {
        ++stats.improving_subsets;
        a.commit(round, std::move(tentative), std::move(outcome));
        if (a.distance() == 0) break;
      }
    }
    a.result.round_stats.push_back(stats);
  }
  return a.finish();
}

AttackResult assa(const ComparisonDataset& dataset, const AttackConfig& config) {
  Attack a(dataset, config);
  std::vector<Position> search = a.pool;
  bool restarted = false;
  for (std::size_t round = 1; round <= config.iterations && a.distance() > 0; ++round) {
    a.result.rounds = round;
    RoundStats stats{search.size(), restarted, 0};

    // Every chunk is scored against the state the round started from.
    const FlipSet start = a.result.flips;
    const std::size_t start_distance = a.distance();
    std::optional<FlipSet> best;
    Evaluator::Outcome best_outcome;
    best_outcome.distance = start_distance;
    std::vector<Position> effective;
    for (const auto& chunk : a.partition(search, start)) {
      const auto applied = a.within_budget(start, chunk);
      if (applied.empty()) continue;
      auto tentative = start.symmetric_difference(applied);
      auto outcome = a.eval.evaluate(tentative);
      if (outcome.distance < start_distance) {
        ++stats.improving_subsets;
        effective.insert(effective.end(), chunk.begin(), chunk.end());
        if (outcome.distance < best_outcome.distance) {
          best = std::move(tentative);
          best_outcome = std::move(outcome);
        }
      }
    }
    a.result.round_stats.push_back(stats);
    if (best) a.commit(round, std::move(*best), std::move(best_outcome));

    if (effective.empty()) {
      if (!config.assa_restart) break;
      search = a.pool;
      restarted = true;
    } else {
      std::sort(effective.begin(), effective.end());
      search = std::move(effective);
      restarted = false;
    }
    if (config.assa_stop_at_budget && a.result.flips.size() >= config.budget) break;
  }
  return a.finish();
}

AttackResult run_attack(Algorithm algorithm, const ComparisonDataset& dataset,
                        const AttackConfig& config) {
  switch (algorithm) {
    case Algorithm::kRandomFlip: return random_flip(dataset, config);
    case Algorithm::kGreedyFlip: return greedy_flip(dataset, config);
    case Algorithm::kRsa: return rsa(dataset, config);
    case Algorithm::kAssa: return assa(dataset, config);
  }
  throw DomainError("unknown algorithm");
}

}  // namespace btattack
