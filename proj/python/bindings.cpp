// Python bindings for the btattack library.

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "btattack/attacks.hpp"
#include "btattack/core.hpp"
#include "btattack/data.hpp"
#include "btattack/errors.hpp"
#include "btattack/experiments.hpp"
#include "btattack/influence.hpp"
#include "btattack/mle.hpp"

namespace py = pybind11;
using namespace btattack;

namespace {

std::vector<double> strengths_list(const StrengthVector& p) {
  return {p.values().begin(), p.values().end()};
}

ComparisonDataset make_dataset(std::vector<std::string> names, std::size_t num_voters,
                               const std::vector<std::tuple<VoterIndex, CandidateIndex,
                                                            CandidateIndex>>& rows) {
  std::vector<Comparison> comparisons;
  comparisons.reserve(rows.size());
  for (const auto& [v, w, l] : rows) comparisons.push_back({v, w, l});
  return ComparisonDataset(CandidateSet(std::move(names)), num_voters, std::move(comparisons));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bradley-Terry ranking fits and flip attacks";

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<IndexError>(m, "IndexError", PyExc_IndexError);
  py::register_exception<NonIdentifiableError>(m, "NonIdentifiableError", PyExc_RuntimeError);
  py::register_exception<IllConditionedError>(m, "IllConditionedError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<ComparisonDataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("candidates"), py::arg("num_voters"),
           py::arg("comparisons") = std::vector<std::tuple<VoterIndex, CandidateIndex,
                                                           CandidateIndex>>{},
           "Build from candidate names and (voter, winner, loser) rows.")
      .def("__len__", &ComparisonDataset::size)
      .def_property_readonly("candidates",
                             [](const ComparisonDataset& d) { return d.candidates().names(); })
      .def_property_readonly("num_voters", &ComparisonDataset::num_voters)
      .def_property_readonly("comparisons",
                             [](const ComparisonDataset& d) {
                               std::vector<std::tuple<VoterIndex, CandidateIndex, CandidateIndex>>
                                   rows;
                               for (const auto& c : d.comparisons()) {
                                 rows.emplace_back(c.voter, c.winner, c.loser);
                               }
                               return rows;
                             })
      .def("counts",
           [](const ComparisonDataset& d) {
             const auto c = aggregate(d);
             std::vector<std::vector<std::int64_t>> rows(c.size(),
                                                         std::vector<std::int64_t>(c.size()));
             for (std::size_t i = 0; i < c.size(); ++i) {
               for (std::size_t j = 0; j < c.size(); ++j) rows[i][j] = c.at(i, j);
             }
             return rows;
           })
      .def("flip",
           [](const ComparisonDataset& d, std::vector<Position> positions) {
             return flip(d, FlipSet(std::move(positions)));
           })
      .def("to_text",
           [](const ComparisonDataset& d) {
             std::ostringstream out;
             serialize_dataset(d, out);
             return out.str();
           })
      .def_static("from_text",
                  [](const std::string& text) {
                    std::istringstream in(text);
                    return load_dataset(in);
                  })
      .def(py::self == py::self);

  py::class_<FitResult>(m, "FitResult")
      .def_property_readonly("strengths",
                             [](const FitResult& r) { return strengths_list(r.strengths); })
      .def_property_readonly("ranking",
                             [](const FitResult& r) {
                               return ranking_from_strengths(r.strengths).order();
                             })
      .def_readonly("log_likelihood", &FitResult::log_likelihood)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("converged", &FitResult::converged);

  m.def(
      "fit",
      [](const ComparisonDataset& d, double tol, std::size_t max_iters, double regularization) {
        FitConfig config;
        config.tol = tol;
        config.max_iters = max_iters;
        config.regularization = regularization;
        return fit(aggregate(d), config);
      },
      py::arg("dataset"), py::arg("tol") = 1e-8, py::arg("max_iters") = 10'000,
      py::arg("regularization") = 0.0, "Maximum-likelihood Bradley-Terry fit.");

  m.def(
      "kendall_tau",
      [](std::vector<CandidateIndex> a, std::vector<CandidateIndex> b) {
        return kendall_tau(Ranking(std::move(a)), Ranking(std::move(b)));
      },
      "Number of discordant pairs between two rankings.");

  m.def(
      "influence",
      [](const ComparisonDataset& d, const std::vector<CountFlip>& flips) {
        const auto counts = aggregate(d);
        const auto est = influence_of_flips(counts, fit(counts).strengths, flips);
        return py::make_tuple(est.delta_theta, est.predicted_ranking.order());
      },
      py::arg("dataset"), py::arg("flips"),
      "First-order change in log-strengths for (winner, loser) count flips.");

  m.def(
      "generate",
      [](std::size_t m_, std::size_t voters, std::size_t per_voter, const std::string& law,
         double rho, std::uint64_t seed) {
        SyntheticSpec spec;
        spec.m = m_;
        spec.n_voters = voters;
        spec.comparisons_per_voter = per_voter;
        if (law == "uniform") {
          spec.law = StrengthLaw::kUniform;
        } else if (law == "geometric") {
          spec.law = StrengthLaw::kGeometric;
        } else {
          throw DomainError("unknown strength law '" + law + "'");
        }
        spec.rho = rho;
        spec.seed = seed;
        auto e = generate_synthetic(spec);
        return py::make_tuple(std::move(e.dataset), strengths_list(e.ground_truth));
      },
      py::arg("m") = 4, py::arg("voters") = 20, py::arg("per_voter") = 6,
      py::arg("law") = "uniform", py::arg("rho") = 0.5, py::arg("seed") = 0,
      "Synthetic electorate and its ground-truth strengths.");

  m.def(
      "ballots_to_dataset",
      [](const std::string& text, const std::string& policy) {
        std::istringstream in(text);
        const auto file = read_ballot_file(in);
        BallotOptions options;
        options.policy = parse_policy(policy);
        return ballots_to_pairwise(file.candidates, file.ballots, options);
      },
      py::arg("text"), py::arg("policy") = "ranked-only",
      "Expand a ranked-ballot file into pairwise comparisons.");

  py::class_<AttackResult>(m, "AttackResult")
      .def_property_readonly("flips",
                             [](const AttackResult& r) {
                               return std::vector<Position>(r.flips.positions().begin(),
                                                            r.flips.positions().end());
                             })
      .def_readonly("manipulated", &AttackResult::manipulated)
      .def_readonly("initial_distance", &AttackResult::initial_distance)
      .def_readonly("final_distance", &AttackResult::final_distance)
      .def_readonly("rounds", &AttackResult::rounds)
      .def_readonly("refits", &AttackResult::refits);

  m.def(
      "attack",
      [](const ComparisonDataset& d, const std::string& algorithm,
         std::vector<CandidateIndex> target, std::size_t budget,
         std::optional<std::vector<VoterIndex>> coalition, std::uint64_t seed,
         std::size_t subsets, std::size_t iterations) {
        AttackConfig config;
        config.target = Ranking(std::move(target));
        config.budget = budget;
        config.coalition = coalition ? std::move(*coalition) : all_voters(d);
        config.seed = seed;
        config.subsets = subsets;
        config.iterations = iterations;
        py::gil_scoped_release release;
        return run_attack(parse_algorithm(algorithm), d, config);
      },
      py::arg("dataset"), py::arg("algorithm"), py::arg("target"), py::arg("budget"),
      py::arg("coalition") = py::none(), py::arg("seed") = 0, py::arg("subsets") = 10,
      py::arg("iterations") = 50, "Run RF, GF, RSA or ASSA against a target ranking.");

  m.def(
      "budget_sweep",
      [](const ComparisonDataset& d, std::vector<std::string> algorithms,
         std::vector<double> fractions, std::size_t trials, std::uint64_t seed,
         std::size_t promote, std::size_t subsets, std::size_t iterations, std::size_t jobs) {
        SweepSpec spec;
        spec.dataset = d;
        spec.algorithms.clear();
        for (const auto& a : algorithms) spec.algorithms.push_back(parse_algorithm(a));
        spec.budget_fractions = std::move(fractions);
        spec.trials = trials;
        spec.seed = seed;
        spec.target.promote = promote;
        spec.attack.subsets = subsets;
        spec.attack.iterations = iterations;
        spec.jobs = jobs;
        spec.record_timing = false;
        SweepTable table;
        {
          py::gil_scoped_release release;
          table = budget_sweep(spec);
        }
        return table_to_json(table);
      },
      py::arg("dataset"), py::arg("algorithms"), py::arg("fractions"), py::arg("trials") = 5,
      py::arg("seed") = 0, py::arg("promote") = 2, py::arg("subsets") = 10,
      py::arg("iterations") = 50, py::arg("jobs") = 1,
      "Budget sweep over one dataset; returns the results table as JSON text.");
}
