#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "btattack/core.hpp"

namespace btattack {

enum class StrengthLaw {
  // p_i ~ U(0, 1], then normalized.
  kUniform,
  // p_i proportional to rho^i.
  kGeometric,
};

struct SyntheticSpec {
  std::size_t m = 4;
  std::size_t n_voters = 20;
  // Distinct unordered pairs judged by each voter.
  std::size_t comparisons_per_voter = 6;
  StrengthLaw law = StrengthLaw::kUniform;
  double rho = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticElectorate {
  ComparisonDataset dataset;
  StrengthVector ground_truth;
};

// Every voter judges `comparisons_per_voter` pairs drawn uniformly without
// replacement; each outcome is a Bradley-Terry draw from the ground truth.
// Comparisons are stored voter by voter.
SyntheticElectorate generate_synthetic(const SyntheticSpec& spec);
// Same, with caller-supplied ground truth (SyntheticSpec::law and rho are ignored).
SyntheticElectorate generate_synthetic(const SyntheticSpec& spec,
                                       const StrengthVector& ground_truth);

struct RankedBallot {
  VoterIndex voter = 0;
  // Distinct candidates, best first. May omit candidates (incomplete ballot).
  std::vector<CandidateIndex> ranking;
  std::size_t weight = 1;

  bool operator==(const RankedBallot&) const = default;
};

struct SyntheticBallots {
  CandidateSet candidates;
  std::vector<RankedBallot> ballots;
  StrengthVector ground_truth;
};

// One complete ranked ballot per voter, drawn from the Plackett-Luce model
// with the ground truth drawn from SyntheticSpec: each next place goes to a remaining candidate
// with probability proportional to its strength. comparisons_per_voter is
// ignored.
SyntheticBallots generate_ballots(const SyntheticSpec& spec);

// Copies of `ballots` cut down to their first `length` places.
std::vector<RankedBallot> truncate_ballots(std::span<const RankedBallot> ballots,
                                           std::size_t length);

enum class IncompletePolicy {
  // Only pairs among ranked candidates.
  kRankedOnly,
  // Additionally, every ranked candidate beats every unranked one.
  kRankedOverUnranked,
};

IncompletePolicy parse_policy(std::string_view name);
std::string_view policy_name(IncompletePolicy policy);

struct BallotOptions {
  IncompletePolicy policy = IncompletePolicy::kRankedOnly;
  // Treat each unit of ballot weight as a separate voter instead of
  // attributing all copies to the ballot's voter.
  bool split_weights = false;
};

// Pairwise expansion of ranked ballots. Voter count is one past the largest
// ballot voter index (or the total weight with split_weights).
ComparisonDataset ballots_to_pairwise(const CandidateSet& candidates,
                                      std::span<const RankedBallot> ballots,
                                      const BallotOptions& options = {});

struct BallotFile {
  CandidateSet candidates;
  std::vector<RankedBallot> ballots;
};

// Ballot text format:
//
//   candidates: Alice,Bob,Carol
//   3: Bob,Alice,Carol
//   Carol
//
// Body lines are "COUNT: name,name,..." best first; the count is optional and
// defaults to 1. Blank lines and lines starting with '#' are skipped. Ballot
// voters are numbered in file order.
//
// This overload reads body lines against a known candidate set; a
// "candidates:" line, if present, must list exactly that set.
std::vector<RankedBallot> parse_ballots(std::istream& in,
                                        const CandidateSet& candidates);
// Reads a whole file; the "candidates:" header is mandatory.
BallotFile read_ballot_file(std::istream& in);

// Dataset text format:
//
//   # btattack dataset
//   m: 3
//   n_voters: 2
//   candidates: a,b,c
//   voter,winner,loser
//   0,0,1
//
// "candidates:" is optional on load (defaults to c0..c{m-1}).
void serialize_dataset(const ComparisonDataset& dataset, std::ostream& out);
ComparisonDataset load_dataset(std::istream& in);

}  // namespace btattack
