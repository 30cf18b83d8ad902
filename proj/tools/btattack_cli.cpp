// Command-line frontend.
//
// Exit codes: 0 success, 1 domain error (non-identifiable data, unreachable
// target, invalid configuration value), 2 usage or parse error.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "btattack/attacks.hpp"
#include "btattack/core.hpp"
#include "btattack/data.hpp"
#include "btattack/errors.hpp"
#include "btattack/experiments.hpp"
#include "btattack/mle.hpp"

using namespace btattack;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// A usage problem detected after flag parsing (bad name, unreadable file).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

struct Inputs {
  json files = json::array();

  std::string read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    files.push_back({{"path", path}, {"fnv1a64", fnv1a64(buf.str())}});
    return buf.str();
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  return out;
}

ComparisonDataset read_dataset(Inputs& inputs, const std::string& path) {
  std::istringstream in(inputs.read(path));
  return load_dataset(in);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

Ranking parse_target(const CandidateSet& candidates, const std::string& text) {
  std::vector<CandidateIndex> order;
  for (const auto& name : split(text)) {
    const auto c = candidates.find(name);
    if (!c) throw UsageError("unknown candidate '" + name + "' in --target");
    order.push_back(*c);
  }
  if (order.size() != candidates.size()) {
    throw UsageError("--target must list all " + std::to_string(candidates.size()) +
                     " candidates, best first");
  }
  try {
    return Ranking(order);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--target: ") + e.what());
  }
}

std::string ranking_names(const CandidateSet& candidates, const Ranking& r) {
  std::string out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    out += (i ? " > " : "") + candidates.name(r[i]);
  }
  return out;
}

std::vector<VoterIndex> parse_voters(const std::string& text) {
  std::vector<VoterIndex> out;
  for (const auto& item : split(text)) {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<VoterIndex>(v));
    } catch (const std::exception&) {
      throw UsageError("bad voter index '" + item + "' in --coalition");
    }
  }
  return out;
}

// Flags shared by every command that fits strengths.
struct FitFlags {
  double tol = 1e-8;
  std::size_t max_iters = 10'000;
  double regularization = 0.0;

  void add(CLI::App* app) {
    app->add_option("--tol", tol, "MM convergence threshold on max |p change|")
        ->capture_default_str();
    app->add_option("--max-iters", max_iters, "MM iteration cap")->capture_default_str();
    app->add_option("--regularization", regularization,
                    "pseudo-count added to every off-diagonal count")
        ->capture_default_str();
  }

  FitConfig config() const { return {tol, max_iters, regularization, false}; }
};

// Flags shared by attack, sweep and threshold.
struct AttackFlags {
  std::size_t subsets = 10;
  std::size_t iterations = 50;
  bool warm_start = false;
  bool skip_oversized = false;
  bool no_restart = false;
  bool stop_at_budget = false;
  bool influence_ordering = false;

  void add(CLI::App* app) {
    app->add_option("--subsets", subsets, "subsets b per partition (RSA, ASSA)")
        ->capture_default_str();
    app->add_option("--iterations", iterations, "rounds n (RSA) or T (ASSA)")
        ->capture_default_str();
    app->add_flag("--warm-start", warm_start, "refit from the incumbent strengths");
    app->add_flag("--skip-oversized", skip_oversized,
                  "skip subsets that exceed the remaining budget instead of truncating");
    app->add_flag("--no-restart", no_restart,
                  "ASSA: stop when no subset improves instead of restarting the pool");
    app->add_flag("--stop-at-budget", stop_at_budget,
                  "ASSA: stop once the flip count reaches the budget");
    app->add_flag("--influence-ordering", influence_ordering,
                  "order pools by predicted first-order gain before partitioning");
  }

  void apply(AttackConfig& c) const {
    c.subsets = subsets;
    c.iterations = iterations;
    c.warm_start = warm_start;
    c.truncate_subsets = !skip_oversized;
    c.assa_restart = !no_restart;
    c.assa_stop_at_budget = stop_at_budget;
    c.influence_ordering = influence_ordering;
  }
};

struct SyntheticFlags {
  std::size_t m = 4;
  std::size_t voters = 20;
  std::size_t per_voter = 6;
  std::string law = "geometric";
  double rho = 0.8;

  void add(CLI::App* app) {
    app->add_option("--m", m, "number of candidates")->capture_default_str();
    app->add_option("--voters", voters, "number of voters")->capture_default_str();
    app->add_option("--per-voter", per_voter, "distinct pairs judged by each voter")
        ->capture_default_str();
    app->add_option("--law", law, "ground-truth strength law")
        ->check(CLI::IsMember({"uniform", "geometric"}))
        ->capture_default_str();
    app->add_option("--rho", rho, "decay ratio of the geometric law")
        ->capture_default_str();
  }

  SyntheticSpec spec(std::uint64_t seed) const {
    SyntheticSpec s;
    s.m = m;
    s.n_voters = voters;
    s.comparisons_per_voter = per_voter;
    s.law = law == "uniform" ? StrengthLaw::kUniform : StrengthLaw::kGeometric;
    s.rho = rho;
    s.seed = seed;
    return s;
  }
};

void write_manifest(const std::string& path, const std::string& command,
                    const CLI::App& used, std::uint64_t seed, const Inputs& inputs,
                    int argc, char** argv) {
  json args = json::array();
  for (int i = 0; i < argc; ++i) args.push_back(argv[i]);
  const json manifest = {{"command", command},
                         {"argv", args},
                         {"config", used.config_to_str(true, false)},
                         {"seed", seed},
                         {"versions", {{"btattack", kVersion}, {"results_schema", kResultsSchemaVersion}}},
                         {"inputs", inputs.files}};
  auto out = open_out(path);
  out << manifest.dump(2) << "\n";
}

json result_to_json(const CandidateSet& names, const AttackResult& r, Algorithm algorithm,
                    const AttackConfig& config) {
  json traj = json::array();
  for (const auto& cp : r.trajectory) {
    traj.push_back({{"round", cp.round},
                    {"flips_used", cp.flips.size()},
                    {"distance", cp.distance},
                    {"accepted", cp.accepted}});
  }
  return {{"algorithm", algorithm_name(algorithm)},
          {"target", ranking_names(names, config.target)},
          {"budget", config.budget},
          {"seed", config.seed},
          {"initial_distance", r.initial_distance},
          {"final_distance", r.final_distance},
          {"flips", std::vector<Position>(r.flips.positions().begin(), r.flips.positions().end())},
          {"rounds", r.rounds},
          {"refits", r.refits},
          {"trajectory", traj}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bradley-Terry ranking manipulation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::uint64_t seed = 0;
  std::string manifest_path;
  Inputs inputs;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "random seed")->capture_default_str();
    cmd->add_option("--manifest", manifest_path, "write a run manifest (JSON) here");
  };

  // generate
  auto* gen = app.add_subcommand("generate", "sample a synthetic Bradley-Terry electorate");
  SyntheticFlags gen_flags;
  std::string gen_out, gen_truth;
  gen_flags.add(gen);
  gen->add_option("--out", gen_out, "dataset file to write")->required();
  gen->add_option("--truth-out", gen_truth, "write ground-truth strengths (JSON) here");
  add_common(gen);

  // fit
  auto* fitc = app.add_subcommand("fit", "fit maximum-likelihood strengths");
  std::string fit_data, fit_out;
  FitFlags fit_flags;
  fitc->add_option("--data", fit_data, "dataset file")->required();
  fitc->add_option("--out", fit_out, "write strengths and ranking (JSON) here");
  fit_flags.add(fitc);
  add_common(fitc);

  // attack
  auto* atk = app.add_subcommand("attack", "run one flip attack");
  std::string atk_data, atk_algorithm = "ASSA", atk_target, atk_coalition, atk_out, atk_report;
  std::optional<std::size_t> atk_budget;
  std::optional<double> atk_fraction;
  std::size_t atk_coalition_size = 0;
  FitFlags atk_fit;
  AttackFlags atk_flags;
  atk->add_option("--data", atk_data, "dataset file")->required();
  atk->add_option("--algorithm", atk_algorithm, "RF, GF, RSA or ASSA")->capture_default_str();
  atk->add_option("--target", atk_target, "target ranking as comma-separated names, best first")
      ->required();
  auto* budget_opt = atk->add_option("--budget", atk_budget, "maximum number of flips");
  atk->add_option("--budget-fraction", atk_fraction,
                  "budget as a fraction of the coalition pool (rounded up)")
      ->excludes(budget_opt);
  auto* coal_opt =
      atk->add_option("--coalition", atk_coalition, "comma-separated voter indices");
  atk->add_option("--coalition-size", atk_coalition_size,
                  "sample a random coalition of this many voters")
      ->excludes(coal_opt);
  atk->add_option("--out", atk_out, "write the manipulated dataset here");
  atk->add_option("--report", atk_report, "write the attack result (JSON) here");
  atk_fit.add(atk);
  atk_flags.add(atk);
  add_common(atk);

  // sweep
  auto* swp = app.add_subcommand("sweep", "budget or hyperparameter sweep");
  std::string swp_data, swp_algorithms = "RF,GF,RSA,ASSA", swp_fractions = "0.01,0.05,0.1,0.2",
                        swp_target, swp_axis, swp_values, swp_criterion = "exact", swp_out,
                        swp_json;
  std::size_t swp_trials = 20, swp_jobs = 1, swp_coalition_size = 0, swp_promote = 2;
  bool swp_reverse = false, swp_no_timing = false;
  SyntheticFlags swp_syn;
  FitFlags swp_fit;
  AttackFlags swp_flags;
  swp->add_option("--data", swp_data, "dataset file (default: synthetic electorates)");
  swp_syn.add(swp);
  swp->add_option("--algorithms", swp_algorithms, "comma-separated algorithms")
      ->capture_default_str();
  swp->add_option("--fractions", swp_fractions, "comma-separated budget fractions")
      ->capture_default_str();
  swp->add_option("--trials", swp_trials, "seeds per cell")->capture_default_str();
  auto* tgt_opt = swp->add_option("--target", swp_target,
                                  "fixed target ranking (names, best first)");
  auto* promote_opt = swp->add_option("--promote", swp_promote,
                                      "target: move this 0-based initial rank to the top")
                          ->capture_default_str()
                          ->excludes(tgt_opt);
  swp->add_flag("--reverse", swp_reverse, "target: reverse the initial ranking")
      ->excludes(tgt_opt)
      ->excludes(promote_opt);
  swp->add_option("--axis", swp_axis, "hyperparameter axis")
      ->check(CLI::IsMember({"subsets", "iterations"}));
  swp->add_option("--values", swp_values, "comma-separated axis values");
  swp->add_option("--coalition-size", swp_coalition_size,
                  "random coalition size per trial (0 = all voters)")
      ->capture_default_str();
  swp->add_option("--criterion", swp_criterion, "success criterion")
      ->check(CLI::IsMember({"exact", "improved"}))
      ->capture_default_str();
  swp->add_option("--jobs", swp_jobs, "worker threads (0 = all cores)")->capture_default_str();
  swp->add_flag("--no-timing", swp_no_timing, "write zero timings for byte-identical output");
  swp->add_option("--out", swp_out, "write the results table (CSV) here");
  swp->add_option("--json", swp_json, "write cells and trials (JSON) here");
  swp_fit.add(swp);
  swp_flags.add(swp);
  add_common(swp);

  // threshold
  auto* thr = app.add_subcommand("threshold", "minimal colluding coalition for a target");
  std::string thr_data, thr_algorithm = "ASSA", thr_target, thr_out;
  std::size_t thr_trials = 5;
  FitFlags thr_fit;
  AttackFlags thr_flags;
  thr->add_option("--data", thr_data, "dataset file")->required();
  thr->add_option("--target", thr_target, "target ranking (names, best first)")->required();
  thr->add_option("--algorithm", thr_algorithm, "RF, GF, RSA or ASSA")->capture_default_str();
  thr->add_option("--trials", thr_trials, "sampled coalitions per probed size")
      ->capture_default_str();
  thr->add_option("--out", thr_out, "write the threshold result (JSON) here");
  thr_fit.add(thr);
  thr_flags.add(thr);
  add_common(thr);

  // convert
  auto* cnv = app.add_subcommand("convert", "expand ranked ballots into pairwise comparisons");
  std::string cnv_ballots, cnv_out, cnv_policy = "ranked-only";
  bool cnv_split = false;
  cnv->add_option("--ballots", cnv_ballots, "ballot file")->required();
  cnv->add_option("--out", cnv_out, "dataset file to write")->required();
  cnv->add_option("--policy", cnv_policy, "incomplete-ballot policy")
      ->check(CLI::IsMember({"ranked-only", "ranked-over-unranked"}))
      ->capture_default_str();
  cnv->add_flag("--split-weights", cnv_split,
                "give every unit of ballot weight its own voter index");
  add_common(cnv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    CLI::App* used = app.get_subcommands().front();
    const std::string command = used->get_name();

    if (used == gen) {
      const auto electorate = generate_synthetic(gen_flags.spec(seed));
      auto out = open_out(gen_out);
      serialize_dataset(electorate.dataset, out);
      if (!gen_truth.empty()) {
        auto t = open_out(gen_truth);
        const auto v = electorate.ground_truth.values();
        t << json{{"strengths", std::vector<double>(v.begin(), v.end())}}.dump(2) << "\n";
      }
      std::cout << "wrote " << electorate.dataset.size() << " comparisons from "
                << electorate.dataset.num_voters() << " voters over "
                << electorate.dataset.num_candidates() << " candidates to " << gen_out << "\n";
    } else if (used == fitc) {
      const auto data = read_dataset(inputs, fit_data);
      const auto counts = aggregate(data);
      const auto report = check_connectivity(counts);
      if (!report.strongly_connected) {
        std::cerr << "warning: " << report.describe(&data.candidates()) << "\n";
      }
      const auto result = fit(counts, fit_flags.config());
      const auto ranking = ranking_from_strengths(result.strengths);
      std::cout << "ranking: " << ranking_names(data.candidates(), ranking) << "\n";
      std::cout << "ranking indices:";
      for (auto c : ranking.order()) std::cout << " " << c;
      std::cout << "\nstrengths:\n";
      for (std::size_t i = 0; i < data.num_candidates(); ++i) {
        std::cout << "  " << data.candidates().name(static_cast<CandidateIndex>(i)) << " "
                  << std::setprecision(10) << result.strengths[i] << "\n";
      }
      std::cout << "log-likelihood: " << std::setprecision(12) << result.log_likelihood
                << "\niterations: " << result.iterations
                << (result.converged ? "" : " (not converged)") << "\n";
      if (!fit_out.empty()) {
        const auto v = result.strengths.values();
        auto out = open_out(fit_out);
        out << json{{"strengths", std::vector<double>(v.begin(), v.end())},
                    {"ranking", ranking.order()},
                    {"log_likelihood", result.log_likelihood},
                    {"iterations", result.iterations},
                    {"converged", result.converged}}
                   .dump(2)
            << "\n";
      }
    } else if (used == atk) {
      const auto data = read_dataset(inputs, atk_data);
      const Algorithm algorithm = parse_algorithm(atk_algorithm);
      AttackConfig config;
      config.fit = atk_fit.config();
      atk_flags.apply(config);
      config.seed = seed;
      config.target = parse_target(data.candidates(), atk_target);
      if (!atk_coalition.empty()) {
        config.coalition = parse_voters(atk_coalition);
      } else if (atk_coalition_size > 0) {
        std::mt19937_64 rng(derive_seed(seed, 2, 0));
        config.coalition = uniform_coalitions(data.num_voters())(atk_coalition_size, rng);
      } else {
        config.coalition = all_voters(data);
      }
      const std::size_t pool = coalition_pool(data, config.coalition).size();
      config.budget = atk_budget ? *atk_budget
                                 : atk_fraction ? budget_for_fraction(*atk_fraction, pool)
                                                : pool;
      const auto result = run_attack(algorithm, data, config);
      const auto final_ranking =
          ranking_from_strengths(fit(aggregate(result.manipulated), config.fit).strengths);
      std::cout << algorithm_name(algorithm) << " with budget " << config.budget << " over a pool of "
                << pool << " comparisons\n"
                << "target: " << ranking_names(data.candidates(), config.target) << "\n"
                << "final ranking: " << ranking_names(data.candidates(), final_ranking) << "\n"
                << "distance: " << result.initial_distance << " -> " << result.final_distance
                << "\nflips: " << result.flips.size() << "\nrounds: " << result.rounds
                << "\nrefits: " << result.refits << "\n";
      if (!atk_out.empty()) {
        auto out = open_out(atk_out);
        serialize_dataset(result.manipulated, out);
      }
      if (!atk_report.empty()) {
        auto out = open_out(atk_report);
        out << result_to_json(data.candidates(), result, algorithm, config).dump(2) << "\n";
      }
    } else if (used == swp) {
      SweepSpec spec;
      if (!swp_data.empty()) {
        spec.dataset = read_dataset(inputs, swp_data);
      } else {
        spec.synthetic = swp_syn.spec(0);
      }
      spec.algorithms.clear();
      for (const auto& a : split(swp_algorithms)) spec.algorithms.push_back(parse_algorithm(a));
      spec.budget_fractions.clear();
      for (const auto& f : split(swp_fractions)) {
        try {
          spec.budget_fractions.push_back(std::stod(f));
        } catch (const std::exception&) {
          throw UsageError("bad fraction '" + f + "' in --fractions");
        }
      }
      spec.trials = swp_trials;
      spec.seed = seed;
      spec.coalition_size = swp_coalition_size;
      spec.criterion = parse_criterion(swp_criterion);
      spec.jobs = swp_jobs;
      spec.record_timing = !swp_no_timing;
      spec.attack.fit = swp_fit.config();
      swp_flags.apply(spec.attack);
      if (!swp_target.empty()) {
        if (!spec.dataset) throw UsageError("--target needs --data (candidate names)");
        spec.target.kind = TargetSpec::Kind::kFixed;
        spec.target.fixed = parse_target(spec.dataset->candidates(), swp_target);
      } else if (swp_reverse) {
        spec.target.kind = TargetSpec::Kind::kReverse;
      } else {
        spec.target.kind = TargetSpec::Kind::kPromote;
        spec.target.promote = swp_promote;
      }

      SweepTable table;
      const bool hyper = !swp_axis.empty();
      if (hyper) {
        if (swp_values.empty()) throw UsageError("--axis needs --values");
        std::vector<std::size_t> values;
        for (const auto& v : split(swp_values)) {
          try {
            values.push_back(std::stoul(v));
          } catch (const std::exception&) {
            throw UsageError("bad value '" + v + "' in --values");
          }
        }
        table = hyperparameter_sweep(parse_axis(swp_axis), values, spec);
      } else {
        table = budget_sweep(spec);
      }
      write_csv(table.cells, std::cout, hyper);
      if (!swp_out.empty()) {
        auto out = open_out(swp_out);
        write_csv(table.cells, out, hyper);
      }
      if (!swp_json.empty()) {
        auto out = open_out(swp_json);
        out << table_to_json(table) << "\n";
      }
    } else if (used == thr) {
      const auto data = read_dataset(inputs, thr_data);
      ThresholdSpec spec;
      spec.algorithm = parse_algorithm(thr_algorithm);
      spec.attack.fit = thr_fit.config();
      thr_flags.apply(spec.attack);
      spec.attack.target = parse_target(data.candidates(), thr_target);
      spec.trials = thr_trials;
      spec.seed = seed;
      const auto result = collusion_threshold(data, spec);
      json probes = json::array();
      for (const auto& p : result.probes) {
        probes.push_back({{"size", p.size}, {"successes", p.successes}, {"trials", p.trials}});
        std::cout << "coalition size " << p.size << ": " << p.successes << "/" << p.trials
                  << " reached the target\n";
      }
      if (!thr_out.empty()) {
        auto out = open_out(thr_out);
        out << json{{"reachable", result.reachable},
                    {"initial_distance", result.initial_distance},
                    {"threshold", result.threshold},
                    {"fraction", result.fraction},
                    {"voters", data.num_voters()},
                    {"probes", probes}}
                   .dump(2)
            << "\n";
      }
      if (!result.reachable) {
        std::cerr << "error: unreachable target: even all " << data.num_voters()
                  << " voters with an unlimited budget do not reach it\n";
        if (!manifest_path.empty()) {
          write_manifest(manifest_path, command, *used, seed, inputs, argc, argv);
        }
        return 1;
      }
      std::cout << "threshold: " << result.threshold << " of " << data.num_voters()
                << " voters (" << std::setprecision(4) << 100.0 * result.fraction << "%)\n";
    } else if (used == cnv) {
      std::istringstream in(inputs.read(cnv_ballots));
      const auto file = read_ballot_file(in);
      const auto data = ballots_to_pairwise(file.candidates, file.ballots,
                                            {parse_policy(cnv_policy), cnv_split});
      auto out = open_out(cnv_out);
      serialize_dataset(data, out);
      std::cout << "wrote " << data.size() << " comparisons from " << file.ballots.size()
                << " ballots (" << data.num_voters() << " voters) to " << cnv_out << "\n";
    }

    if (!manifest_path.empty()) {
      write_manifest(manifest_path, command, *used, seed, inputs, argc, argv);
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IndexError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NonIdentifiableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
