#include "btattack/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "btattack/errors.hpp"

namespace btattack {

CandidateSet::CandidateSet(std::vector<std::string> names)
    : names_(std::move(names)) {
  if (names_.size() < 2) {
    throw DomainError("a candidate set needs at least two candidates");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& name : names_) {
    if (!seen.insert(name).second) {
      throw DomainError("duplicate candidate name '" + name + "'");
    }
  }
}

CandidateSet CandidateSet::numbered(std::size_t m) {
  std::vector<std::string> names;
  names.reserve(m);
  for (std::size_t i = 0; i < m; ++i) names.push_back("c" + std::to_string(i));
  return CandidateSet(std::move(names));
}

const std::string& CandidateSet::name(CandidateIndex c) const {
  if (c >= names_.size()) {
    throw IndexError("candidate index " + std::to_string(c) + " out of range");
  }
  return names_[c];
}

std::optional<CandidateIndex> CandidateSet::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<CandidateIndex>(it - names_.begin());
}

ComparisonDataset::ComparisonDataset(CandidateSet candidates,
                                     std::size_t num_voters,
                                     std::vector<Comparison> comparisons)
    : candidates_(std::move(candidates)),
      num_voters_(num_voters),
      comparisons_(std::move(comparisons)) {
  const std::size_t m = candidates_.size();
  for (std::size_t pos = 0; pos < comparisons_.size(); ++pos) {
    const Comparison& c = comparisons_[pos];
    if (c.winner >= m || c.loser >= m) {
      throw IndexError("comparison " + std::to_string(pos) +
                       " references a candidate outside 0.." +
                       std::to_string(m - 1));
    }
    if (c.winner == c.loser) {
      throw DomainError("comparison " + std::to_string(pos) +
                        " has identical winner and loser");
    }
    if (c.voter >= num_voters_) {
      throw IndexError("comparison " + std::to_string(pos) + " voter " +
                       std::to_string(c.voter) + " >= voter count " +
                       std::to_string(num_voters_));
    }
  }
}

CountMatrix::CountMatrix(std::size_t m) : m_(m), data_(m * m, 0) {}

CountMatrix::CountMatrix(const std::vector<std::vector<std::int64_t>>& rows)
    : CountMatrix(rows.size()) {
  for (std::size_t i = 0; i < m_; ++i) {
    if (rows[i].size() != m_) throw DimensionError("count matrix must be square");
    for (std::size_t j = 0; j < m_; ++j) {
      if (rows[i][j] < 0) throw DomainError("counts must be non-negative");
      if (i == j && rows[i][j] != 0) {
        throw DomainError("count matrix diagonal must be zero");
      }
      data_[i * m_ + j] = rows[i][j];
    }
  }
}

void CountMatrix::add(std::size_t i, std::size_t j, std::int64_t delta) {
  if (i >= m_ || j >= m_) throw IndexError("count matrix index out of range");
  if (i == j) throw DomainError("count matrix diagonal must stay zero");
  auto& cell = data_[i * m_ + j];
  if (cell + delta < 0) throw DomainError("counts must be non-negative");
  cell += delta;
}

std::int64_t CountMatrix::wins(std::size_t i) const {
  std::int64_t w = 0;
  for (std::size_t j = 0; j < m_; ++j) w += at(i, j);
  return w;
}

std::int64_t CountMatrix::total() const {
  return std::accumulate(data_.begin(), data_.end(), std::int64_t{0});
}

StrengthVector::StrengthVector(std::vector<double> p) : p_(std::move(p)) {
  if (p_.size() < 2) throw DomainError("strength vector needs m >= 2");
  double sum = 0.0;
  for (double v : p_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("strengths must be positive and finite");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kStrengthSumTolerance) {
    throw DomainError("strengths must sum to 1 (got " + std::to_string(sum) + ")");
  }
}

StrengthVector StrengthVector::normalized(std::vector<double> raw) {
  double sum = 0.0;
  for (double v : raw) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("strengths must be positive and finite");
    }
    sum += v;
  }
  for (double& v : raw) v /= sum;
  return StrengthVector(std::move(raw));
}

StrengthVector StrengthVector::uniform(std::size_t m) {
  return StrengthVector(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

Ranking::Ranking(std::vector<CandidateIndex> order)
    : order_(std::move(order)), position_(order_.size(), order_.size()) {
  for (std::size_t pos = 0; pos < order_.size(); ++pos) {
    const CandidateIndex c = order_[pos];
    if (c >= order_.size() || position_[c] != order_.size()) {
      throw DomainError("ranking is not a permutation of 0..m-1");
    }
    position_[c] = pos;
  }
}

Ranking Ranking::identity(std::size_t m) {
  std::vector<CandidateIndex> order(m);
  std::iota(order.begin(), order.end(), CandidateIndex{0});
  return Ranking(std::move(order));
}

FlipSet::FlipSet(std::vector<Position> positions) : positions_(std::move(positions)) {
  std::sort(positions_.begin(), positions_.end());
  if (std::adjacent_find(positions_.begin(), positions_.end()) != positions_.end()) {
    throw DomainError("flip set contains duplicate positions");
  }
}

bool FlipSet::contains(Position pos) const {
  return std::binary_search(positions_.begin(), positions_.end(), pos);
}

FlipSet FlipSet::symmetric_difference(std::span<const Position> toggled) const {
  std::vector<Position> sorted(toggled.begin(), toggled.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Position> out;
  out.reserve(positions_.size() + sorted.size());
  std::set_symmetric_difference(positions_.begin(), positions_.end(),
                                sorted.begin(), sorted.end(),
                                std::back_inserter(out));
  return FlipSet(std::move(out));
}

std::size_t FlipSet::symmetric_difference_size(
    std::span<const Position> toggled) const {
  std::size_t overlap = 0;
  for (Position pos : toggled) overlap += contains(pos) ? 1 : 0;
  return positions_.size() + toggled.size() - 2 * overlap;
}

CountMatrix aggregate(const ComparisonDataset& dataset) {
  CountMatrix counts(dataset.num_candidates());
  for (const Comparison& c : dataset.comparisons()) counts.add(c.winner, c.loser, 1);
  return counts;
}

double bt_probability(double p_i, double p_j) {
  if (!(p_i > 0.0) || !(p_j > 0.0)) {
    throw DomainError("Bradley-Terry strengths must be positive");
  }
  return p_i / (p_i + p_j);
}

Ranking ranking_from_strengths(const StrengthVector& p) {
  std::vector<CandidateIndex> order(p.size());
  std::iota(order.begin(), order.end(), CandidateIndex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](CandidateIndex a, CandidateIndex b) { return p[a] > p[b]; });
  return Ranking(std::move(order));
}

namespace {

// Counts inversions of `seq` by merge sort; `seq` ends up sorted.
std::size_t count_inversions(std::vector<std::size_t>& seq,
                             std::vector<std::size_t>& scratch, std::size_t lo,
                             std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::size_t inversions = count_inversions(seq, scratch, lo, mid) +
                           count_inversions(seq, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (seq[j] < seq[i]) {
      inversions += mid - i;
      scratch[k++] = seq[j++];
    } else {
      scratch[k++] = seq[i++];
    }
  }
  while (i < mid) scratch[k++] = seq[i++];
  while (j < hi) scratch[k++] = seq[j++];
  std::copy(scratch.begin() + lo, scratch.begin() + hi, seq.begin() + lo);
  return inversions;
}

}  // namespace

std::size_t kendall_tau(const Ranking& a, const Ranking& b) {
  if (a.size() != b.size()) {
    throw DimensionError("kendall_tau: rankings have different lengths (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
  // Positions in b of the candidates listed in a's order; every inversion is a
  // discordant pair.
  std::vector<std::size_t> seq(a.size());
  for (std::size_t pos = 0; pos < a.size(); ++pos) seq[pos] = b.position_of(a[pos]);
  std::vector<std::size_t> scratch(seq.size());
  return count_inversions(seq, scratch, 0, seq.size());
}

ComparisonDataset flip(const ComparisonDataset& dataset, const FlipSet& delta) {
  std::vector<Comparison> out(dataset.comparisons().begin(),
                              dataset.comparisons().end());
  for (Position pos : delta.positions()) {
    if (pos >= out.size()) {
      throw IndexError("flip position " + std::to_string(pos) +
                       " outside dataset of size " + std::to_string(out.size()));
    }
    std::swap(out[pos].winner, out[pos].loser);
  }
  return ComparisonDataset(dataset.candidates(), dataset.num_voters(), std::move(out));
}

}  // namespace btattack
