#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "btattack/errors.hpp"
#include "btattack/influence.hpp"
#include "btattack/mle.hpp"
#include "helpers.hpp"

using namespace btattack;
using btattack::testing::random_connected_counts;

namespace {

std::vector<double> centered_log(const StrengthVector& p) {
  std::vector<double> t(p.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) mean += (t[i] = std::log(p[i]));
  for (double& v : t) v -= mean / static_cast<double>(t.size());
  return t;
}

CountMatrix times(const CountMatrix& c, std::int64_t r) {
  CountMatrix out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (i != j) out.add(i, j, r * c.at(i, j));
    }
  }
  return out;
}

}  // namespace

TEST(FlipGradientDelta, TwoCandidateExample) {
  const auto d = flip_gradient_delta(CountMatrix({{0, 2}, {1, 0}}), StrengthVector::uniform(2), 0, 1);
  EXPECT_EQ(d, (std::vector<double>{-1.0, 1.0}));
}

TEST(FlipGradientDelta, EqualsTwoEvaluationDifference) {
  std::mt19937_64 rng(30);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 3 + t % 3;
    const auto c = random_connected_counts(m, 6, rng);
    std::vector<double> raw(m);
    for (double& v : raw) v = u(rng);
    const auto p = StrengthVector::normalized(raw);
    for (CandidateIndex w = 0; w < m; ++w) {
      for (CandidateIndex l = 0; l < m; ++l) {
        if (w == l || c.at(w, l) == 0) continue;
        CountMatrix flipped = c;
        flipped.add(w, l, -1);
        flipped.add(l, w, 1);
        const auto before = gradient(c, p), after = gradient(flipped, p);
        const auto d = flip_gradient_delta(c, p, w, l);
        for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(d[i], after[i] - before[i], 1e-12);

        // Flipping back cancels.
        const auto back = flip_gradient_delta(flipped, p, l, w);
        for (std::size_t i = 0; i < m; ++i) EXPECT_EQ(d[i] + back[i], 0.0);
      }
    }
  }
}

TEST(FlipGradientDelta, Errors) {
  const CountMatrix c({{0, 1}, {0, 0}});
  EXPECT_THROW(flip_gradient_delta(c, StrengthVector::uniform(2), 1, 0), DomainError);
  EXPECT_THROW(flip_gradient_delta(c, StrengthVector::uniform(2), 0, 0), DomainError);
  EXPECT_THROW(flip_gradient_delta(c, StrengthVector::uniform(2), 0, 2), IndexError);
}

TEST(InfluenceOfFlips, EmptyFlipList) {
  const CountMatrix c({{0, 3, 2}, {1, 0, 2}, {1, 1, 0}});
  const auto p = fit(c).strengths;
  const auto est = influence_of_flips(c, p, {});
  for (double v : est.delta_theta) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(est.predicted_ranking, ranking_from_strengths(p));
}

TEST(InfluenceOfFlips, SymmetricInstance) {
  const CountMatrix c({{0, 3, 3, 3}, {3, 0, 3, 3}, {3, 3, 0, 3}, {3, 3, 3, 0}});
  const auto p = fit(c).strengths;
  const CountFlip one[] = {{1, 2}};
  const auto d = influence_of_flips(c, p, one).delta_theta;
  EXPECT_GT(d[2], 0.0);
  EXPECT_LT(d[1], 0.0);
  EXPECT_NEAR(d[0], d[3], 1e-12);
  EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 0.0, 1e-12);
}

TEST(InfluenceOfFlips, SingularHessianReportsCut) {
  // Candidates {0,1} and {2,3} are never compared with each other.
  const CountMatrix split({{0, 2, 0, 0}, {2, 0, 0, 0}, {0, 0, 0, 2}, {0, 0, 2, 0}});
  try {
    InfluenceModel model(split, StrengthVector::uniform(4));
    FAIL() << "expected IllConditionedError";
  } catch (const IllConditionedError& e) {
    const auto& cut = e.cut();
    ASSERT_EQ(cut.size(), 2u);
    EXPECT_TRUE((cut == std::vector<std::size_t>{0, 1}) || (cut == std::vector<std::size_t>{2, 3}));
  }
}

TEST(InfluenceOfFlips, NullSpaceAndLinearity) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 30; ++t) {
    const std::size_t m = 3 + t % 3;
    const auto c = random_connected_counts(m, 8, rng);
    const auto p = fit(c).strengths;
    const InfluenceModel model(c, p);
    std::vector<CountFlip> flips;
    std::vector<double> summed(m, 0.0);
    for (CandidateIndex w = 0; w < m; ++w) {
      for (CandidateIndex l = 0; l < m; ++l) {
        if (w == l || c.at(w, l) == 0) continue;
        flips.emplace_back(w, l);
        const auto d = model.single_flip(w, l);
        EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 0.0, 1e-9);
        for (std::size_t i = 0; i < m; ++i) summed[i] += d[i];
      }
    }
    const auto joint = influence_of_flips(c, p, flips).delta_theta;
    EXPECT_NEAR(std::accumulate(joint.begin(), joint.end(), 0.0), 0.0, 1e-9);
    for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(joint[i], summed[i], 1e-10);
  }
}

TEST(InfluenceOfFlips, FirstOrderRatioOnReplicatedData) {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 10; ++t) {
    const std::size_t m = 3 + t % 3;
    const auto c = times(random_connected_counts(m, 5, rng), 20);
    const auto p = fit(c).strengths;
    const auto theta = centered_log(p);
    CandidateIndex w = 0, l = 1;
    for (CandidateIndex i = 0; i < m; ++i) {
      for (CandidateIndex j = 0; j < m; ++j) {
        if (i != j && c.at(i, j) > c.at(w, l)) w = i, l = j;
      }
    }
    CountMatrix flipped = c;
    flipped.add(w, l, -1);
    flipped.add(l, w, 1);
    FitConfig strict;
    strict.tol = 1e-13;
    const auto after = centered_log(fit(flipped, strict).strengths);
    const CountFlip one[] = {{w, l}};
    const auto predicted = influence_of_flips(c, p, one).delta_theta;
    const double ratio = (after[l] - theta[l]) / predicted[l];
    EXPECT_GE(ratio, 0.5);
    EXPECT_LE(ratio, 2.0);
  }
}
