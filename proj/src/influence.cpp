#include "btattack/influence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "btattack/errors.hpp"
#include "btattack/mle.hpp"

namespace btattack {

namespace {

// Relative size below which a Laplacian eigenvalue counts as zero.
constexpr double kSingularRatio = 1e-12;

void require_same_size(const CountMatrix& counts, const StrengthVector& p) {
  if (counts.size() != p.size()) {
    throw DimensionError("count matrix has " + std::to_string(counts.size()) +
                         " candidates but strength vector has length " +
                         std::to_string(p.size()));
  }
}

void require_candidate(std::size_t m, CandidateIndex c) {
  if (c >= m) {
    throw IndexError("candidate " + std::to_string(c) + " out of range for m = " +
                     std::to_string(m));
  }
}

}  // namespace

std::vector<double> flip_gradient_delta(const CountMatrix& counts,
                                        const StrengthVector& p,
                                        CandidateIndex winner, CandidateIndex loser) {
  require_same_size(counts, p);
  require_candidate(counts.size(), winner);
  require_candidate(counts.size(), loser);
  if (winner == loser) throw DomainError("a flip needs two distinct candidates");
  if (counts.at(winner, loser) == 0) {
    throw DomainError("no comparison won by " + std::to_string(winner) + " against " +
                      std::to_string(loser) + " to flip");
  }
  std::vector<double> delta(counts.size(), 0.0);
  delta[winner] = -1.0;
  delta[loser] = 1.0;
  return delta;
}

InfluenceModel::InfluenceModel(const CountMatrix& counts, const StrengthVector& p_hat) {
  require_same_size(counts, p_hat);
  const std::size_t m = counts.size();
  theta_hat_.resize(m);
  for (std::size_t i = 0; i < m; ++i) theta_hat_[i] = std::log(p_hat[i]);

  const Eigen::MatrixXd laplacian = -hessian(counts, p_hat);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(laplacian);
  const auto& values = eig.eigenvalues();
  const auto& vectors = eig.eigenvectors();
  const double scale = std::max(values.cwiseAbs().maxCoeff(), 1e-300);

  // values[0] belongs to the all-ones direction; the next one (the algebraic
  // connectivity) must be clearly positive.
  if (values.size() > 1 && values(1) <= kSingularRatio * scale) {
    // With a repeated zero eigenvalue the solver may return any basis of the
    // null space, so use whichever of the two vectors is further from constant.
    Eigen::VectorXd a = vectors.col(0).array() - vectors.col(0).mean();
    Eigen::VectorXd b = vectors.col(1).array() - vectors.col(1).mean();
    const Eigen::VectorXd& fiedler = b.norm() >= a.norm() ? b : a;
    const double eps = 1e-9 * fiedler.cwiseAbs().maxCoeff();
    std::vector<std::size_t> cut;
    for (Eigen::Index i = 0; i < fiedler.size(); ++i) {
      if (fiedler(i) < -eps) cut.push_back(static_cast<std::size_t>(i));
    }
    std::string names;
    for (std::size_t c : cut) names += (names.empty() ? "" : ",") + std::to_string(c);
    throw IllConditionedError(
        "Hessian is singular beyond the all-ones direction (algebraic connectivity " +
            std::to_string(values(1)) + "); weakest cut separates {" + names + "}",
        cut);
  }

  Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                               static_cast<Eigen::Index>(m));
  for (Eigen::Index k = 1; k < values.size(); ++k) {
    pinv += vectors.col(k) * vectors.col(k).transpose() / values(k);
  }
  laplacian_pinv_.assign(pinv.data(), pinv.data() + pinv.size());
}

std::vector<double> InfluenceModel::solve(std::span<const double> gradient_delta) const {
  const std::size_t m = theta_hat_.size();
  if (gradient_delta.size() != m) {
    throw DimensionError("gradient perturbation has length " +
                         std::to_string(gradient_delta.size()) + ", expected " +
                         std::to_string(m));
  }
  // H d = -g with H = -L gives L d = g; the pseudo-inverse keeps d zero-sum.
  std::vector<double> d(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double g = gradient_delta[j];
    if (g == 0.0) continue;
    for (std::size_t i = 0; i < m; ++i) d[i] += laplacian_pinv_[j * m + i] * g;
  }
  return d;
}

std::vector<double> InfluenceModel::single_flip(CandidateIndex winner,
                                                CandidateIndex loser) const {
  const std::size_t m = theta_hat_.size();
  require_candidate(m, winner);
  require_candidate(m, loser);
  std::vector<double> d(m);
  for (std::size_t i = 0; i < m; ++i) {
    d[i] = laplacian_pinv_[loser * m + i] - laplacian_pinv_[winner * m + i];
  }
  return d;
}

InfluenceEstimate influence_of_flips(const CountMatrix& counts,
                                     const StrengthVector& p_hat,
                                     std::span<const CountFlip> flips) {
  const InfluenceModel model(counts, p_hat);
  const std::size_t m = counts.size();
  std::vector<double> g(m, 0.0);
  for (const auto& [winner, loser] : flips) {
    const auto delta = flip_gradient_delta(counts, p_hat, winner, loser);
    for (std::size_t i = 0; i < m; ++i) g[i] += delta[i];
  }
  auto delta_theta = model.solve(g);

  std::vector<double> shifted(m);
  const auto theta = model.theta_hat();
  const double top = *std::max_element(theta.begin(), theta.end());
  for (std::size_t i = 0; i < m; ++i) shifted[i] = std::exp(theta[i] + delta_theta[i] - top);
  return {std::move(delta_theta),
          ranking_from_strengths(StrengthVector::normalized(std::move(shifted)))};
}

}  // namespace btattack
