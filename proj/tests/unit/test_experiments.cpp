#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <sstream>

#include "btattack/errors.hpp"
#include "btattack/experiments.hpp"
#include "helpers.hpp"

using namespace btattack;
using btattack::testing::random_identifiable_dataset;

namespace {

SweepSpec small_sweep() {
  SweepSpec spec;
  SyntheticSpec s;
  s.m = 4;
  s.n_voters = 10;
  s.comparisons_per_voter = 4;
  s.law = StrengthLaw::kGeometric;
  s.rho = 0.8;
  spec.synthetic = s;
  spec.trials = 4;
  spec.seed = 77;
  spec.attack.subsets = 3;
  spec.attack.iterations = 4;
  spec.record_timing = false;
  return spec;
}

TrialResult trial(std::size_t initial, std::size_t final_distance) {
  TrialResult t;
  t.initial_distance = initial;
  t.final_distance = final_distance;
  return t;
}

}  // namespace

TEST(Seeds, DeriveSeedSeparatesStreams) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(2, 0, 0));
}

TEST(Budget, CeilingOfFraction) {
  EXPECT_EQ(budget_for_fraction(0.01, 120), 2u);
  EXPECT_EQ(budget_for_fraction(0.05, 120), 6u);
  EXPECT_EQ(budget_for_fraction(0.01, 10), 1u);
  EXPECT_EQ(budget_for_fraction(1.0, 37), 37u);
  EXPECT_THROW(budget_for_fraction(0.0, 10), DomainError);
  EXPECT_THROW(budget_for_fraction(1.5, 10), DomainError);
}

TEST(TargetSpec, Resolve) {
  const Ranking initial({3, 1, 0, 2});
  TargetSpec promote;
  promote.promote = 2;
  EXPECT_EQ(promote.resolve(initial), Ranking({0, 3, 1, 2}));
  TargetSpec reverse;
  reverse.kind = TargetSpec::Kind::kReverse;
  EXPECT_EQ(reverse.resolve(initial), Ranking({2, 0, 1, 3}));
  TargetSpec fixed;
  fixed.kind = TargetSpec::Kind::kFixed;
  EXPECT_THROW(fixed.resolve(initial), DomainError);
  fixed.fixed = Ranking({0, 1});
  EXPECT_THROW(fixed.resolve(initial), DimensionError);
  promote.promote = 4;
  EXPECT_THROW(promote.resolve(initial), DomainError);
}

TEST(SuccessRate, Examples) {
  const std::vector<TrialResult> all_hit{trial(3, 0), trial(1, 0)};
  EXPECT_EQ(success_rate(all_hit), 1.0);
  const std::vector<TrialResult> none{trial(3, 3), trial(2, 2)};
  EXPECT_EQ(success_rate(none, SuccessCriterion::kExact), 0.0);
  EXPECT_EQ(success_rate(none, SuccessCriterion::kImproved), 0.0);
  EXPECT_THROW(success_rate({}), DomainError);
  EXPECT_EQ(parse_criterion(criterion_name(SuccessCriterion::kImproved)),
            SuccessCriterion::kImproved);
}

TEST(SuccessRate, ImprovedDominatesExact) {
  std::mt19937_64 rng(60);
  for (int t = 0; t < 200; ++t) {
    std::vector<TrialResult> trials;
    for (int k = 0; k < 1 + t % 6; ++k) {
      const std::size_t initial = rng() % 5;
      trials.push_back(trial(initial, initial == 0 ? 0 : rng() % (initial + 1)));
    }
    const double exact = success_rate(trials, SuccessCriterion::kExact);
    EXPECT_GE(exact, 0.0);
    EXPECT_LE(exact, 1.0);
    EXPECT_GE(success_rate(trials, SuccessCriterion::kImproved), exact);
  }
}

TEST(BudgetSweep, SaturatedRandomFlipAttemptsWholePool) {
  auto spec = small_sweep();
  spec.algorithms = {Algorithm::kRandomFlip};
  spec.budget_fractions = {1.0};
  spec.trials = 1;
  const auto table = budget_sweep(spec);
  ASSERT_EQ(table.cells.size(), 1u);
  ASSERT_EQ(table.trials.size(), 1u);
  EXPECT_EQ(table.trials[0].budget, 40u);
}

TEST(BudgetSweep, TargetEqualsInitialAlwaysSucceeds) {
  auto spec = small_sweep();
  spec.target.promote = 0;
  spec.budget_fractions = {0.1, 0.5};
  const auto table = budget_sweep(spec);
  ASSERT_EQ(table.cells.size(), 8u);
  for (const auto& cell : table.cells) {
    EXPECT_EQ(cell.mean_final_kd, 0.0);
    EXPECT_EQ(cell.success_rate, 1.0);
  }
}

TEST(BudgetSweep, CellOrderingAndSummaryBounds) {
  auto spec = small_sweep();
  spec.budget_fractions = {0.05, 0.2};
  const auto table = budget_sweep(spec);
  ASSERT_EQ(table.cells.size(), spec.algorithms.size() * 2);
  for (std::size_t i = 0; i < table.cells.size(); ++i) {
    const auto& c = table.cells[i];
    EXPECT_EQ(c.algorithm, spec.algorithms[i / 2]);
    EXPECT_EQ(c.budget_fraction, spec.budget_fractions[i % 2]);
    EXPECT_EQ(c.trials, spec.trials);
    EXPECT_LE(c.min_final_kd, c.mean_final_kd);
    EXPECT_LE(c.mean_final_kd, c.max_final_kd);
    EXPECT_GE(c.success_rate, 0.0);
    EXPECT_LE(c.success_rate, 1.0);
  }
  for (const auto& t : table.trials) EXPECT_LE(t.flips, t.budget);
}

TEST(BudgetSweep, ReproducibleAndIndependentOfJobCount) {
  auto spec = small_sweep();
  spec.budget_fractions = {0.1, 0.3};
  const auto serial = budget_sweep(spec);
  EXPECT_EQ(serial, budget_sweep(spec));
  spec.jobs = 4;
  const auto parallel = budget_sweep(spec);
  EXPECT_EQ(serial, parallel);
  std::ostringstream a, b;
  write_csv(serial.cells, a);
  write_csv(parallel.cells, b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(BudgetSweep, RejectsBadSpecs) {
  auto spec = small_sweep();
  spec.budget_fractions = {0.0};
  EXPECT_THROW(budget_sweep(spec), DomainError);
  spec = small_sweep();
  spec.trials = 0;
  EXPECT_THROW(budget_sweep(spec), DomainError);
  spec = small_sweep();
  spec.synthetic.reset();
  EXPECT_THROW(budget_sweep(spec), DomainError);
}

TEST(HyperparameterSweep, SingleIterationRunsOneRound) {
  std::mt19937_64 rng(61);
  const auto d = random_identifiable_dataset(rng, 4, 10, 4);
  AttackConfig c;
  c.target = Ranking({3, 2, 1, 0});
  c.budget = d.size();
  c.coalition = all_voters(d);
  c.subsets = 4;
  c.iterations = 1;
  const auto r = assa(d, c);
  EXPECT_EQ(r.rounds, 1u);
  EXPECT_EQ(r.round_stats.size(), 1u);
  // Round 0 is the untouched starting point.
  for (const auto& cp : r.trajectory) EXPECT_LE(cp.round, 1u);
}

TEST(HyperparameterSweep, PoolSizedSubsetsAreSingletons) {
  std::mt19937_64 rng(62);
  const auto d = random_identifiable_dataset(rng, 4, 8, 3);
  AttackConfig c;
  c.target = Ranking({3, 2, 1, 0});
  c.budget = d.size();
  c.coalition = all_voters(d);
  c.subsets = d.size();
  c.iterations = 6;
  const auto r = assa(d, c);
  ASSERT_FALSE(r.trajectory.empty());
  for (std::size_t k = 1; k < r.trajectory.size(); ++k) {
    const auto& prev = r.trajectory[k - 1].flips;
    EXPECT_EQ(prev.symmetric_difference_size(r.trajectory[k].flips.positions()), 1u);
  }
}

TEST(HyperparameterSweep, MoreIterationsNeverHurt) {
  auto spec = small_sweep();
  spec.algorithms = {Algorithm::kRsa, Algorithm::kAssa};
  spec.budget_fractions = {0.3};
  spec.trials = 5;
  const std::size_t values[] = {1, 3, 8};
  const auto table = hyperparameter_sweep(SweepAxis::kIterations, values, spec);
  ASSERT_EQ(table.cells.size(), 6u);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t v = 1; v < 3; ++v) {
      const auto& lo = table.cells[a * 3 + v - 1];
      const auto& hi = table.cells[a * 3 + v];
      EXPECT_EQ(hi.iterations, values[v]);
      EXPECT_GE(hi.success_rate, lo.success_rate);
      EXPECT_LE(hi.mean_final_kd, lo.mean_final_kd);
    }
  }
}

TEST(CollusionThreshold, TargetEqualsInitialNeedsOneVoter) {
  std::mt19937_64 rng(63);
  const auto d = random_identifiable_dataset(rng, 4, 10, 4);
  ThresholdSpec spec;
  spec.attack.target = ranking_from_strengths(fit(aggregate(d)).strengths);
  spec.attack.subsets = 2;
  spec.attack.iterations = 2;
  const auto r = collusion_threshold(d, spec);
  EXPECT_TRUE(r.reachable);
  EXPECT_EQ(r.initial_distance, 0u);
  EXPECT_EQ(r.threshold, 1u);
  EXPECT_DOUBLE_EQ(r.fraction, 0.1);
}

TEST(CollusionThreshold, MatchesBruteForceOnTenVoters) {
  // Prefix coalitions with a deterministic attacker make every size a single outcome.
  const CoalitionSampler prefix = [](std::size_t size, std::mt19937_64&) {
    std::vector<VoterIndex> c(size);
    std::iota(c.begin(), c.end(), 0);
    return c;
  };
  std::mt19937_64 rng(64);
  std::size_t checked = 0;
  for (int attempt = 0; attempt < 40 && checked < 3; ++attempt) {
    const auto d = random_identifiable_dataset(rng, 4, 10, 3);
    auto order = ranking_from_strengths(fit(aggregate(d)).strengths).order();
    std::swap(order[0], order[1]);
    ThresholdSpec spec;
    spec.algorithm = Algorithm::kGreedyFlip;
    spec.attack.target = Ranking(order);
    spec.trials = 1;
    spec.sampler = prefix;
    const auto r = collusion_threshold(d, spec);
    if (!r.reachable) continue;
    ++checked;

    std::vector<bool> ok(11, false);
    for (std::size_t s = 1; s <= 10; ++s) {
      AttackConfig c = spec.attack;
      c.coalition = prefix(s, rng);
      c.budget = coalition_pool(d, c.coalition).size();
      ok[s] = greedy_flip(d, c).final_distance == 0;
    }
    ASSERT_TRUE(ok[10]);
    EXPECT_TRUE(ok[r.threshold]);
    std::size_t upward = 10;
    while (upward > 1 && ok[upward - 1]) --upward;
    EXPECT_LE(r.threshold, 10u);
    if (std::find(ok.begin() + 1, ok.begin() + static_cast<long>(upward), true) ==
        ok.begin() + static_cast<long>(upward)) {
      EXPECT_EQ(r.threshold, upward);
    }
    for (const auto& probe : r.probes) {
      EXPECT_EQ(probe.successes == 1, ok[probe.size]);
    }
  }
  EXPECT_GE(checked, 1u);
}

TEST(Emit, CsvHeaderOnlyForEmptyTable) {
  std::ostringstream out;
  write_csv({}, out);
  EXPECT_EQ(out.str(),
            "algorithm,budget_fraction,trials,mean_final_kd,mean_reduction,mean_rank_shift,"
            "success_rate,mean_flips,seconds\n");
}

TEST(Emit, JsonRoundTrip) {
  auto spec = small_sweep();
  spec.budget_fractions = {0.25};
  spec.record_timing = true;
  const auto table = budget_sweep(spec);
  EXPECT_EQ(table_from_json(table_to_json(table)), table);
  EXPECT_EQ(table_from_json(table_to_json(SweepTable{})), SweepTable{});
  EXPECT_THROW(table_from_json("{not json"), ParseError);
}

TEST(RunJobs, RunsEveryIndexAndRethrows) {
  std::vector<std::atomic<int>> hits(50);
  run_jobs(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(run_jobs(10, 3,
                        [](std::size_t i) {
                          if (i == 7) throw DomainError("boom");
                        }),
               DomainError);
}
