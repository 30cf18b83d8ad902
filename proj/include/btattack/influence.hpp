#pragma once

#include <span>
#include <utility>
#include <vector>

#include "btattack/core.hpp"

namespace btattack {

// First-order (implicit function theorem) prediction of how the fitted
// log-strengths move when comparisons are flipped.
struct InfluenceEstimate {
  // Predicted shift in theta = ln p. Sums to zero.
  std::vector<double> delta_theta;
  // Ranking of exp(theta_hat + delta_theta).
  Ranking predicted_ranking;
};

// A flip of one (winner, loser) comparison.
using CountFlip = std::pair<CandidateIndex, CandidateIndex>;

// Exact change of gradient(counts, p) when one count moves from
// n[winner][loser] to n[loser][winner]. The expectation terms depend only on
// pair totals, which a flip preserves, so the result is e_loser - e_winner.
// Throws DomainError when n[winner][loser] == 0.
std::vector<double> flip_gradient_delta(const CountMatrix& counts,
                                        const StrengthVector& p,
                                        CandidateIndex winner, CandidateIndex loser);

// Solves H * delta_theta = -sum(flip_gradient_delta) on the zero-sum subspace,
// H being the log-likelihood Hessian at p_hat. Throws IllConditionedError when
// H is singular beyond the all-ones direction.
InfluenceEstimate influence_of_flips(const CountMatrix& counts,
                                     const StrengthVector& p_hat,
                                     std::span<const CountFlip> flips);

// Reusable factorization for many influence queries at one fitted point.
class InfluenceModel {
 public:
  InfluenceModel(const CountMatrix& counts, const StrengthVector& p_hat);

  // delta_theta for a gradient perturbation (must sum to zero).
  std::vector<double> solve(std::span<const double> gradient_delta) const;
  // delta_theta for a single flip winner -> loser.
  std::vector<double> single_flip(CandidateIndex winner, CandidateIndex loser) const;

  std::size_t size() const { return theta_hat_.size(); }
  std::span<const double> theta_hat() const { return theta_hat_; }

 private:
  std::vector<double> theta_hat_;
  // Pseudo-inverse of the negated Hessian (graph Laplacian).
  std::vector<double> laplacian_pinv_;
};

}  // namespace btattack
