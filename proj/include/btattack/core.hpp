#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace btattack {

using CandidateIndex = std::uint32_t;
using VoterIndex = std::uint32_t;
// Position of a comparison inside a ComparisonDataset.
using Position = std::size_t;

// Named candidates, indexed 0..m-1. At least two, names unique.
class CandidateSet {
 public:
  explicit CandidateSet(std::vector<std::string> names);

  // Candidates named "c0", "c1", ...
  static CandidateSet numbered(std::size_t m);

  std::size_t size() const { return names_.size(); }
  const std::string& name(CandidateIndex c) const;
  const std::vector<std::string>& names() const { return names_; }
  std::optional<CandidateIndex> find(std::string_view name) const;

  bool operator==(const CandidateSet&) const = default;

 private:
  std::vector<std::string> names_;
};

// Voter `voter` preferred `winner` over `loser`.
struct Comparison {
  VoterIndex voter = 0;
  CandidateIndex winner = 0;
  CandidateIndex loser = 0;

  bool operator==(const Comparison&) const = default;
};

// Ordered, voter-attributed pairwise preferences. Immutable after
// construction; every comparison is validated against the candidate set and
// voter count.
class ComparisonDataset {
 public:
  ComparisonDataset(CandidateSet candidates, std::size_t num_voters,
                    std::vector<Comparison> comparisons = {});

  std::size_t size() const { return comparisons_.size(); }
  bool empty() const { return comparisons_.empty(); }
  const Comparison& operator[](Position pos) const { return comparisons_[pos]; }
  std::span<const Comparison> comparisons() const { return comparisons_; }

  const CandidateSet& candidates() const { return candidates_; }
  std::size_t num_candidates() const { return candidates_.size(); }
  std::size_t num_voters() const { return num_voters_; }

  bool operator==(const ComparisonDataset&) const = default;

 private:
  CandidateSet candidates_;
  std::size_t num_voters_;
  std::vector<Comparison> comparisons_;
};

// m x m aggregate win counts: at(i, j) is the number of comparisons won by i
// against j. Diagonal is zero.
class CountMatrix {
 public:
  explicit CountMatrix(std::size_t m);
  // Row-major nested initialization; validates shape, sign and diagonal.
  explicit CountMatrix(const std::vector<std::vector<std::int64_t>>& rows);

  std::size_t size() const { return m_; }
  std::int64_t at(std::size_t i, std::size_t j) const { return data_[i * m_ + j]; }
  void add(std::size_t i, std::size_t j, std::int64_t delta);

  // n_ij + n_ji
  std::int64_t pair_total(std::size_t i, std::size_t j) const {
    return at(i, j) + at(j, i);
  }
  std::int64_t wins(std::size_t i) const;
  std::int64_t total() const;

  bool operator==(const CountMatrix&) const = default;

 private:
  std::size_t m_;
  std::vector<std::int64_t> data_;
};

inline constexpr double kStrengthSumTolerance = 1e-9;

// Latent Bradley-Terry strengths: all positive, summing to one.
class StrengthVector {
 public:
  // Requires positive entries that already sum to one within tolerance.
  explicit StrengthVector(std::vector<double> p);

  // Scales arbitrary positive values to sum one.
  static StrengthVector normalized(std::vector<double> raw);
  static StrengthVector uniform(std::size_t m);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> values() const { return p_; }

  bool operator==(const StrengthVector&) const = default;

 private:
  std::vector<double> p_;
};

// A permutation of candidate indices, best candidate first.
class Ranking {
 public:
  explicit Ranking(std::vector<CandidateIndex> order);
  static Ranking identity(std::size_t m);

  std::size_t size() const { return order_.size(); }
  CandidateIndex operator[](std::size_t pos) const { return order_[pos]; }
  // 0-based rank of candidate c (0 = best).
  std::size_t position_of(CandidateIndex c) const { return position_[c]; }
  const std::vector<CandidateIndex>& order() const { return order_; }

  bool operator==(const Ranking& other) const { return order_ == other.order_; }

 private:
  std::vector<CandidateIndex> order_;
  std::vector<std::size_t> position_;
};

// Positions of the comparisons an adversary flips. Kept sorted, duplicate
// free.
class FlipSet {
 public:
  FlipSet() = default;
  explicit FlipSet(std::vector<Position> positions);

  std::size_t size() const { return positions_.size(); }
  bool empty() const { return positions_.empty(); }
  bool contains(Position pos) const;
  std::span<const Position> positions() const { return positions_; }

  // Net effect of flipping `toggled` on top of this set: positions present in
  // both cancel out. `toggled` must be duplicate free.
  FlipSet symmetric_difference(std::span<const Position> toggled) const;
  // Size of symmetric_difference(toggled) without materializing it.
  std::size_t symmetric_difference_size(std::span<const Position> toggled) const;

  bool operator==(const FlipSet&) const = default;

 private:
  std::vector<Position> positions_;
};

CountMatrix aggregate(const ComparisonDataset& dataset);

// P(i beats j) = p_i / (p_i + p_j).
double bt_probability(double p_i, double p_j);

// Candidates by descending strength; ties go to the lower index.
Ranking ranking_from_strengths(const StrengthVector& p);

// Number of candidate pairs ordered oppositely by `a` and `b`. O(m log m).
std::size_t kendall_tau(const Ranking& a, const Ranking& b);

// Exchanges winner and loser at every position in `delta`.
ComparisonDataset flip(const ComparisonDataset& dataset, const FlipSet& delta);

}  // namespace btattack
