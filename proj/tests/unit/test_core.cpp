#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "btattack/core.hpp"
#include "btattack/errors.hpp"
#include "helpers.hpp"

using namespace btattack;
using btattack::testing::brute_kendall;
using btattack::testing::random_dataset;
using btattack::testing::random_ranking;

TEST(CandidateSet, RejectsFewerThanTwoOrDuplicates) {
  EXPECT_THROW(CandidateSet({"a"}), DomainError);
  EXPECT_THROW(CandidateSet({"a", "b", "a"}), DomainError);
  const CandidateSet set({"x", "y"});
  EXPECT_EQ(set.size(), 2u);
  EXPECT_EQ(set.find("y"), CandidateIndex{1});
  EXPECT_FALSE(set.find("z").has_value());
  EXPECT_THROW(set.name(2), IndexError);
}

TEST(CandidateSet, NumberedNames) {
  const auto set = CandidateSet::numbered(3);
  EXPECT_EQ(set.names(), (std::vector<std::string>{"c0", "c1", "c2"}));
}

TEST(ComparisonDataset, ValidatesComparisons) {
  const auto names = CandidateSet::numbered(3);
  EXPECT_THROW(ComparisonDataset(names, 1, {{0, 1, 1}}), DomainError);
  EXPECT_THROW(ComparisonDataset(names, 1, {{0, 0, 3}}), IndexError);
  EXPECT_THROW(ComparisonDataset(names, 1, {{1, 0, 1}}), IndexError);
  EXPECT_NO_THROW(ComparisonDataset(names, 2, {{1, 0, 1}}));
}

TEST(CountMatrix, ValidatesRows) {
  EXPECT_THROW(CountMatrix({{0, 1}, {1}}), DimensionError);
  EXPECT_THROW(CountMatrix({{0, -1}, {1, 0}}), DomainError);
  EXPECT_THROW(CountMatrix({{1, 1}, {1, 0}}), DomainError);
  const CountMatrix c({{0, 2}, {3, 0}});
  EXPECT_EQ(c.pair_total(0, 1), 5);
  EXPECT_EQ(c.wins(1), 3);
  EXPECT_EQ(c.total(), 5);
}

TEST(StrengthVector, Invariants) {
  EXPECT_THROW(StrengthVector({0.5, 0.5, 0.0}), DomainError);
  EXPECT_THROW(StrengthVector({0.6, 0.6}), DomainError);
  EXPECT_THROW(StrengthVector({-0.5, 1.5}), DomainError);
  EXPECT_NO_THROW(StrengthVector({0.25, 0.75}));
  const auto p = StrengthVector::normalized({2.0, 6.0});
  EXPECT_DOUBLE_EQ(p[0], 0.25);
  EXPECT_DOUBLE_EQ(p[1], 0.75);
}

TEST(Ranking, MustBePermutation) {
  EXPECT_THROW(Ranking({0, 0, 1}), DomainError);
  EXPECT_THROW(Ranking({0, 3, 1}), DomainError);
  const Ranking r({2, 0, 1});
  EXPECT_EQ(r.position_of(2), 0u);
  EXPECT_EQ(r.position_of(1), 2u);
}

TEST(FlipSet, SortedAndDuplicateFree) {
  EXPECT_THROW(FlipSet({1, 1}), DomainError);
  const FlipSet f({5, 2, 9});
  EXPECT_EQ(std::vector<Position>(f.positions().begin(), f.positions().end()),
            (std::vector<Position>{2, 5, 9}));
  EXPECT_TRUE(f.contains(5));
  EXPECT_FALSE(f.contains(4));
}

TEST(FlipSet, SymmetricDifferenceCancelsRepeats) {
  const FlipSet f({1, 3, 5});
  const std::vector<Position> toggled{3, 4};
  const auto g = f.symmetric_difference(toggled);
  EXPECT_EQ(g, FlipSet({1, 4, 5}));
  EXPECT_EQ(f.symmetric_difference_size(toggled), g.size());
}

TEST(Aggregate, Examples) {
  const auto names = CandidateSet::numbered(3);
  EXPECT_EQ(aggregate(ComparisonDataset(names, 0)), CountMatrix(3));

  const auto single = aggregate(ComparisonDataset(names, 1, {{0, 0, 1}}));
  EXPECT_EQ(single, CountMatrix({{0, 1, 0}, {0, 0, 0}, {0, 0, 0}}));

  const auto c = aggregate(ComparisonDataset(names, 2, {{0, 0, 1}, {1, 0, 1}, {0, 1, 0}}));
  EXPECT_EQ(c.at(0, 1), 2);
  EXPECT_EQ(c.at(1, 0), 1);
  EXPECT_EQ(c.total(), 3);
}

TEST(BtProbability, Examples) {
  EXPECT_DOUBLE_EQ(bt_probability(0.5, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(bt_probability(0.75, 0.25), 0.75);
  EXPECT_THROW(bt_probability(0.0, 0.5), DomainError);
  EXPECT_THROW(bt_probability(0.5, -1.0), DomainError);
}

TEST(BtProbability, Complementarity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(1e-6, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    EXPECT_NEAR(bt_probability(a, b) + bt_probability(b, a), 1.0, 1e-15);
  }
}

TEST(RankingFromStrengths, Examples) {
  EXPECT_EQ(ranking_from_strengths(StrengthVector({0.5, 0.3, 0.2})), Ranking({0, 1, 2}));
  EXPECT_EQ(ranking_from_strengths(StrengthVector({0.2, 0.3, 0.5})), Ranking({2, 1, 0}));
  EXPECT_EQ(ranking_from_strengths(StrengthVector::uniform(3)), Ranking({0, 1, 2}));
}

TEST(RankingFromStrengths, ScaleInvariant) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> raw(6), scaled(6);
    const double c = u(rng) * 100.0;
    for (std::size_t i = 0; i < raw.size(); ++i) scaled[i] = c * (raw[i] = u(rng));
    EXPECT_EQ(ranking_from_strengths(StrengthVector::normalized(raw)),
              ranking_from_strengths(StrengthVector::normalized(scaled)));
  }
}

TEST(KendallTau, Examples) {
  EXPECT_EQ(kendall_tau(Ranking({0, 1, 2, 3}), Ranking({0, 1, 2, 3})), 0u);
  EXPECT_EQ(kendall_tau(Ranking({0, 1, 2, 3}), Ranking({3, 2, 1, 0})), 6u);
  EXPECT_EQ(kendall_tau(Ranking({0, 1, 2, 3}), Ranking({1, 0, 2, 3})), 1u);
  EXPECT_THROW(kendall_tau(Ranking({0, 1}), Ranking({0, 1, 2})), DimensionError);
}

TEST(KendallTau, MatchesBruteForceAndIsAMetric) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 500; ++t) {
    const std::size_t m = 2 + rng() % 7;
    const auto a = random_ranking(m, rng), b = random_ranking(m, rng), c = random_ranking(m, rng);
    const auto ab = kendall_tau(a, b);
    EXPECT_EQ(ab, brute_kendall(a, b));
    EXPECT_EQ(ab, kendall_tau(b, a));
    EXPECT_EQ(ab == 0, a == b);
    EXPECT_LE(kendall_tau(a, c), ab + kendall_tau(b, c));
  }
}

TEST(Flip, Examples) {
  const auto names = CandidateSet::numbered(2);
  const ComparisonDataset d(names, 1, {{0, 0, 1}});
  EXPECT_EQ(flip(d, FlipSet()), d);
  EXPECT_EQ(flip(d, FlipSet({0})), ComparisonDataset(names, 1, {{0, 1, 0}}));
  EXPECT_THROW(flip(d, FlipSet({1})), IndexError);
}

TEST(Flip, InvolutionAndPairTotals) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const auto d = random_dataset(rng, 4, 6, 3);
    std::vector<Position> pos;
    for (Position p = 0; p < d.size(); ++p) {
      if (rng() % 3 == 0) pos.push_back(p);
    }
    const FlipSet delta(pos);
    const auto once = flip(d, delta);
    EXPECT_EQ(flip(once, delta), d);
    const auto before = aggregate(d), after = aggregate(once);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_EQ(before.pair_total(i, j), after.pair_total(i, j));
      }
    }
  }
}
