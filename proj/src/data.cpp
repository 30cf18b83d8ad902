#include "btattack/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>

#include "btattack/errors.hpp"

namespace btattack {

void SyntheticSpec::validate() const {
  if (m < 2) throw DomainError("synthetic electorate needs m >= 2");
  if (comparisons_per_voter > m * (m - 1) / 2) {
    throw DomainError("comparisons_per_voter exceeds the number of pairs m(m-1)/2");
  }
  if (law == StrengthLaw::kGeometric && !(rho > 0.0 && rho <= 1.0)) {
    throw DomainError("geometric strength law needs rho in (0, 1]");
  }
}

namespace {

StrengthVector draw_ground_truth(const SyntheticSpec& spec, std::mt19937_64& rng) {
  std::vector<double> raw(spec.m);
  if (spec.law == StrengthLaw::kGeometric) {
    for (std::size_t i = 0; i < spec.m; ++i) {
      raw[i] = std::pow(spec.rho, static_cast<double>(i));
    }
  } else {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // 1 - U lies in (0, 1].
    for (double& v : raw) v = 1.0 - unit(rng);
  }
  return StrengthVector::normalized(std::move(raw));
}

SyntheticElectorate sample(const SyntheticSpec& spec, StrengthVector truth,
                           std::mt19937_64& rng) {
  std::vector<std::pair<CandidateIndex, CandidateIndex>> pairs;
  for (CandidateIndex i = 0; i < spec.m; ++i) {
    for (CandidateIndex j = i + 1; j < spec.m; ++j) pairs.emplace_back(i, j);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Comparison> comparisons;
  comparisons.reserve(spec.n_voters * spec.comparisons_per_voter);
  for (std::size_t v = 0; v < spec.n_voters; ++v) {
    // Partial Fisher-Yates: the first k entries become a uniform k-subset.
    for (std::size_t k = 0; k < spec.comparisons_per_voter; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, pairs.size() - 1);
      std::swap(pairs[k], pairs[pick(rng)]);
      const auto [i, j] = pairs[k];
      const bool i_wins = unit(rng) < bt_probability(truth[i], truth[j]);
      comparisons.push_back({static_cast<VoterIndex>(v), i_wins ? i : j, i_wins ? j : i});
    }
  }
  return {ComparisonDataset(CandidateSet::numbered(spec.m), spec.n_voters,
                            std::move(comparisons)),
          std::move(truth)};
}

}  // namespace

SyntheticElectorate generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  StrengthVector truth = draw_ground_truth(spec, rng);
  return sample(spec, std::move(truth), rng);
}

SyntheticElectorate generate_synthetic(const SyntheticSpec& spec,
                                       const StrengthVector& ground_truth) {
  spec.validate();
  if (ground_truth.size() != spec.m) {
    throw DimensionError("ground truth length differs from m");
  }
  std::mt19937_64 rng(spec.seed);
  return sample(spec, ground_truth, rng);
}

SyntheticBallots generate_ballots(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  StrengthVector truth = draw_ground_truth(spec, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RankedBallot> ballots;
  ballots.reserve(spec.n_voters);
  for (std::size_t v = 0; v < spec.n_voters; ++v) {
    std::vector<CandidateIndex> left(spec.m);
    for (std::size_t c = 0; c < spec.m; ++c) left[c] = static_cast<CandidateIndex>(c);
    RankedBallot ballot{static_cast<VoterIndex>(v), {}, 1};
    while (!left.empty()) {
      double mass = 0.0;
      for (CandidateIndex c : left) mass += truth[c];
      double u = unit(rng) * mass;
      std::size_t pick = left.size() - 1;
      for (std::size_t k = 0; k + 1 < left.size(); ++k) {
        u -= truth[left[k]];
        if (u < 0.0) {
          pick = k;
          break;
        }
      }
      ballot.ranking.push_back(left[pick]);
      left.erase(left.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    ballots.push_back(std::move(ballot));
  }
  return {CandidateSet::numbered(spec.m), std::move(ballots), std::move(truth)};
}

std::vector<RankedBallot> truncate_ballots(std::span<const RankedBallot> ballots,
                                           std::size_t length) {
  std::vector<RankedBallot> out(ballots.begin(), ballots.end());
  for (auto& b : out) {
    if (b.ranking.size() > length) b.ranking.resize(length);
  }
  return out;
}

IncompletePolicy parse_policy(std::string_view name) {
  if (name == "ranked-only") return IncompletePolicy::kRankedOnly;
  if (name == "ranked-over-unranked") return IncompletePolicy::kRankedOverUnranked;
  throw DomainError("unknown incomplete-ballot policy '" + std::string(name) +
                    "' (expected ranked-only or ranked-over-unranked)");
}

std::string_view policy_name(IncompletePolicy policy) {
  return policy == IncompletePolicy::kRankedOnly ? "ranked-only"
                                                 : "ranked-over-unranked";
}

ComparisonDataset ballots_to_pairwise(const CandidateSet& candidates,
                                      std::span<const RankedBallot> ballots,
                                      const BallotOptions& options) {
  const std::size_t m = candidates.size();
  std::vector<Comparison> out;
  std::size_t num_voters = 0;
  VoterIndex next_split_voter = 0;
  std::vector<char> ranked(m);

  for (const RankedBallot& ballot : ballots) {
    std::fill(ranked.begin(), ranked.end(), 0);
    for (CandidateIndex c : ballot.ranking) {
      if (c >= m) throw IndexError("ballot references unknown candidate index");
      if (ranked[c]) throw DomainError("ballot ranks a candidate twice");
      ranked[c] = 1;
    }
    if (ballot.weight < 1) throw DomainError("ballot weight must be >= 1");

    std::vector<std::pair<CandidateIndex, CandidateIndex>> pairs;
    const auto& r = ballot.ranking;
    for (std::size_t a = 0; a < r.size(); ++a) {
      for (std::size_t b = a + 1; b < r.size(); ++b) pairs.emplace_back(r[a], r[b]);
    }
    if (options.policy == IncompletePolicy::kRankedOverUnranked) {
      for (CandidateIndex winner : r) {
        for (CandidateIndex loser = 0; loser < m; ++loser) {
          if (!ranked[loser]) pairs.emplace_back(winner, loser);
        }
      }
    }

    for (std::size_t copy = 0; copy < ballot.weight; ++copy) {
      const VoterIndex voter = options.split_weights ? next_split_voter++ : ballot.voter;
      for (const auto& [w, l] : pairs) out.push_back({voter, w, l});
    }
    if (!options.split_weights) {
      num_voters = std::max<std::size_t>(num_voters, std::size_t{ballot.voter} + 1);
    }
  }
  if (options.split_weights) num_voters = next_split_voter;
  return ComparisonDataset(candidates, num_voters, std::move(out));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_unsigned(std::string_view s, std::size_t line, const char* what) {
  T value{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(std::string("malformed ") + what + " '" + std::string(s) + "'",
                     line);
  }
  return value;
}

bool starts_with_key(std::string_view line, std::string_view key,
                     std::string_view& rest) {
  if (line.substr(0, key.size()) != key) return false;
  rest = trim(line.substr(key.size()));
  return true;
}

std::vector<std::string> parse_candidate_list(std::string_view list, std::size_t line) {
  std::vector<std::string> names;
  for (auto name : split_commas(list)) {
    if (name.empty()) throw ParseError("empty candidate name", line);
    names.emplace_back(name);
  }
  return names;
}

CandidateSet make_candidates(std::vector<std::string> names, std::size_t line) {
  try {
    return CandidateSet(std::move(names));
  } catch (const DomainError& e) {
    throw ParseError(e.what(), line);
  }
}

RankedBallot parse_ballot_line(std::string_view line, std::size_t line_no,
                               const CandidateSet& candidates, VoterIndex voter) {
  RankedBallot ballot;
  ballot.voter = voter;
  std::string_view body = line;
  if (const auto colon = line.find(':'); colon != std::string_view::npos) {
    ballot.weight = parse_unsigned<std::size_t>(trim(line.substr(0, colon)), line_no,
                                                "ballot count");
    if (ballot.weight == 0) throw ParseError("ballot count must be >= 1", line_no);
    body = trim(line.substr(colon + 1));
  }
  if (body.empty()) throw ParseError("ballot ranks no candidates", line_no);
  std::vector<char> seen(candidates.size(), 0);
  for (auto name : split_commas(body)) {
    const auto idx = candidates.find(name);
    if (!idx) {
      throw ParseError("unknown candidate '" + std::string(name) + "'", line_no);
    }
    if (seen[*idx]) {
      throw ParseError("candidate '" + std::string(name) + "' ranked twice", line_no);
    }
    seen[*idx] = 1;
    ballot.ranking.push_back(*idx);
  }
  return ballot;
}

}  // namespace

std::vector<RankedBallot> parse_ballots(std::istream& in,
                                        const CandidateSet& candidates) {
  std::vector<RankedBallot> ballots;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::string_view rest;
    if (starts_with_key(line, "candidates:", rest)) {
      if (parse_candidate_list(rest, line_no) != candidates.names()) {
        throw ParseError("candidate header does not match the candidate set", line_no);
      }
      continue;
    }
    ballots.push_back(parse_ballot_line(line, line_no, candidates,
                                        static_cast<VoterIndex>(ballots.size())));
  }
  return ballots;
}

BallotFile read_ballot_file(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  std::optional<CandidateSet> candidates;
  std::vector<RankedBallot> ballots;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::string_view rest;
    if (starts_with_key(line, "candidates:", rest)) {
      if (candidates) throw ParseError("duplicate candidates header", line_no);
      candidates = make_candidates(parse_candidate_list(rest, line_no), line_no);
      continue;
    }
    if (!candidates) {
      throw ParseError("ballot before the 'candidates:' header", line_no);
    }
    ballots.push_back(parse_ballot_line(line, line_no, *candidates,
                                        static_cast<VoterIndex>(ballots.size())));
  }
  if (!candidates) throw ParseError("missing 'candidates:' header", 0);
  return {std::move(*candidates), std::move(ballots)};
}

void serialize_dataset(const ComparisonDataset& dataset, std::ostream& out) {
  out << "# btattack dataset\n";
  out << "m: " << dataset.num_candidates() << '\n';
  out << "n_voters: " << dataset.num_voters() << '\n';
  out << "candidates: ";
  const auto& names = dataset.candidates().names();
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << "\nvoter,winner,loser\n";
  for (const Comparison& c : dataset.comparisons()) {
    out << c.voter << ',' << c.winner << ',' << c.loser << '\n';
  }
}

ComparisonDataset load_dataset(std::istream& in) {
  std::optional<std::size_t> m, n_voters;
  std::optional<std::vector<std::string>> names;
  std::vector<Comparison> comparisons;
  bool in_body = false;
  std::string raw;
  std::size_t line_no = 0;
  std::size_t body_line = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!in_body) {
      std::string_view rest;
      if (starts_with_key(line, "m:", rest)) {
        m = parse_unsigned<std::size_t>(rest, line_no, "candidate count");
      } else if (starts_with_key(line, "n_voters:", rest)) {
        n_voters = parse_unsigned<std::size_t>(rest, line_no, "voter count");
      } else if (starts_with_key(line, "candidates:", rest)) {
        names = parse_candidate_list(rest, line_no);
      } else if (line == "voter,winner,loser") {
        if (!m || !n_voters) {
          throw ParseError("dataset header needs 'm:' and 'n_voters:'", line_no);
        }
        in_body = true;
        body_line = line_no;
      } else {
        throw ParseError("unexpected header line '" + std::string(line) + "'", line_no);
      }
      continue;
    }
    const auto fields = split_commas(line);
    if (fields.size() != 3) {
      throw ParseError("expected voter,winner,loser", line_no);
    }
    Comparison c{parse_unsigned<VoterIndex>(fields[0], line_no, "voter id"),
                 parse_unsigned<CandidateIndex>(fields[1], line_no, "winner id"),
                 parse_unsigned<CandidateIndex>(fields[2], line_no, "loser id")};
    if (c.winner >= *m || c.loser >= *m || c.winner == c.loser || c.voter >= *n_voters) {
      throw ParseError("comparison out of range for the declared header", line_no);
    }
    comparisons.push_back(c);
  }
  if (!in_body) throw ParseError("missing 'voter,winner,loser' column line", 0);
  CandidateSet candidates =
      names ? make_candidates(std::move(*names), body_line) : CandidateSet::numbered(*m);
  if (candidates.size() != *m) {
    throw ParseError("candidate list length differs from m", body_line);
  }
  return ComparisonDataset(std::move(candidates), *n_voters, std::move(comparisons));
}

}  // namespace btattack
