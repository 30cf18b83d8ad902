#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "btattack/core.hpp"

namespace btattack {

// Solver controls for the MM fit.
struct FitConfig {
  // Convergence threshold on max_i |p_i^(t+1) - p_i^(t)|.
  double tol = 1e-8;
  std::size_t max_iters = 10'000;
  // Pseudo-count added to every off-diagonal count.
  double regularization = 0.0;
  // Record the log-likelihood after every iteration in FitResult::trace.
  bool record_trace = false;

  void validate() const;
};

struct FitResult {
  StrengthVector strengths;
  // Objective at `strengths`, over the (regularized) counts that were fitted.
  double log_likelihood = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  // Max absolute parameter change in the last iteration.
  double last_change = 0.0;
  // trace[0] is the starting point, trace[t] the value after iteration t.
  std::vector<double> trace;

  bool operator==(const FitResult&) const = default;
};

// Sum over i<j of n_ij ln(p_i/(p_i+p_j)) + n_ji ln(p_j/(p_i+p_j)).
double log_likelihood(const CountMatrix& counts, const StrengthVector& p);

// Maximum-likelihood Bradley-Terry strengths by Hunter's MM iteration
//
//   p_i <- W_i / sum_{j != i} (n_ij + n_ji) / (p_i + p_j),
//
// renormalized to sum one after every sweep. Starts from the uniform vector,
// or from `start` when given (warm start). Throws NonIdentifiableError when the
// (regularized) comparison graph is not strongly connected. Running out of
// iterations is reported through FitResult::converged, not an exception.
FitResult fit(const CountMatrix& counts, const FitConfig& config = {});
FitResult fit(const CountMatrix& counts, const FitConfig& config,
              const StrengthVector& start);

// Gradient of the log-likelihood in log-strengths theta_i = ln p_i:
// component i is sum_{j != i} [n_ij - (n_ij + n_ji) p_i / (p_i + p_j)].
std::vector<double> gradient(const CountMatrix& counts, const StrengthVector& p);

// Hessian of the log-likelihood in theta. Off-diagonal (i, j) is
// (n_ij + n_ji) p_i p_j / (p_i + p_j)^2, the diagonal makes every row sum to
// zero. This is the negated, variance-weighted Laplacian of the comparison
// graph, so it is negative semidefinite with the all-ones null direction.
Eigen::MatrixXd hessian(const CountMatrix& counts, const StrengthVector& p);

struct CandidateComponent {
  std::vector<std::size_t> members;
  // No edges enter / leave the component in the condensation.
  bool source = false;
  bool sink = false;
};

// Strong connectivity of the directed graph with edge i -> j iff n_ij > 0.
struct ConnectivityReport {
  bool strongly_connected = false;
  // Strongly connected components, sources of the condensation first.
  std::vector<CandidateComponent> components;

  std::string describe(const CandidateSet* names = nullptr) const;
};

ConnectivityReport check_connectivity(const CountMatrix& counts);

}  // namespace btattack
