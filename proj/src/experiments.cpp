#include "btattack/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "btattack/errors.hpp"
#include "btattack/mle.hpp"

namespace btattack {

SuccessCriterion parse_criterion(std::string_view name) {
  if (name == "exact") return SuccessCriterion::kExact;
  if (name == "improved") return SuccessCriterion::kImproved;
  throw DomainError("unknown success criterion '" + std::string(name) +
                    "' (expected exact or improved)");
}

std::string_view criterion_name(SuccessCriterion criterion) {
  return criterion == SuccessCriterion::kExact ? "exact" : "improved";
}

SweepAxis parse_axis(std::string_view name) {
  if (name == "subsets") return SweepAxis::kSubsets;
  if (name == "iterations") return SweepAxis::kIterations;
  throw DomainError("unknown sweep axis '" + std::string(name) +
                    "' (expected subsets or iterations)");
}

std::string_view axis_name(SweepAxis axis) {
  return axis == SweepAxis::kSubsets ? "subsets" : "iterations";
}

Ranking TargetSpec::resolve(const Ranking& initial) const {
  switch (kind) {
    case Kind::kFixed:
      if (!fixed) throw DomainError("fixed target requested but none given");
      if (fixed->size() != initial.size()) {
        throw DimensionError("target ranks " + std::to_string(fixed->size()) +
                             " candidates, dataset has " +
                             std::to_string(initial.size()));
      }
      return *fixed;
    case Kind::kPromote: {
      if (promote >= initial.size()) {
        throw DomainError("cannot promote rank " + std::to_string(promote) + " of " +
                          std::to_string(initial.size()) + " candidates");
      }
      auto order = initial.order();
      std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(promote),
                  order.begin() + static_cast<std::ptrdiff_t>(promote) + 1);
      return Ranking(std::move(order));
    }
    case Kind::kReverse: {
      auto order = initial.order();
      std::reverse(order.begin(), order.end());
      return Ranking(std::move(order));
    }
  }
  throw DomainError("unknown target kind");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ stream) ^ index);
}

std::size_t budget_for_fraction(double fraction, std::size_t pool_size) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw DomainError("budget fraction must lie in (0, 1]");
  }
  // The slack keeps exact products such as 0.05 * 120 from rounding up.
  const double k = std::ceil(fraction * static_cast<double>(pool_size) - 1e-9);
  return std::min(pool_size, static_cast<std::size_t>(std::max(k, 0.0)));
}

void SweepSpec::validate() const {
  if (synthetic.has_value() == dataset.has_value()) {
    throw DomainError("sweep needs exactly one of a synthetic spec or a dataset");
  }
  if (synthetic) synthetic->validate();
  if (algorithms.empty()) throw DomainError("sweep needs at least one algorithm");
  if (budget_fractions.empty()) throw DomainError("sweep needs at least one budget fraction");
  for (double f : budget_fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw DomainError("budget fractions must lie in (0, 1]");
  }
  if (trials < 1) throw DomainError("sweep needs at least one trial");
  if (attack.subsets < 1) throw DomainError("subsets must be at least 1");
  if (attack.iterations < 1) throw DomainError("iterations must be at least 1");
  attack.fit.validate();
}

bool trial_succeeded(const TrialResult& trial, SuccessCriterion criterion) {
  return criterion == SuccessCriterion::kExact
             ? trial.final_distance == 0
             : trial.final_distance < trial.initial_distance || trial.final_distance == 0;
}

double success_rate(std::span<const TrialResult> trials, SuccessCriterion criterion) {
  if (trials.empty()) throw DomainError("success rate needs at least one trial");
  std::size_t hits = 0;
  for (const auto& t : trials) hits += trial_succeeded(t, criterion) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(trials.size());
}

CellResult summarize(std::span<const TrialResult> trials, SuccessCriterion criterion) {
  if (trials.empty()) throw DomainError("cannot summarize an empty cell");
  CellResult cell;
  cell.algorithm = trials.front().algorithm;
  cell.budget_fraction = trials.front().budget_fraction;
  cell.subsets = trials.front().subsets;
  cell.iterations = trials.front().iterations;
  cell.trials = trials.size();
  cell.min_final_kd = std::numeric_limits<double>::infinity();
  cell.max_final_kd = -std::numeric_limits<double>::infinity();
  for (const auto& t : trials) {
    const auto final_kd = static_cast<double>(t.final_distance);
    cell.mean_final_kd += final_kd;
    cell.min_final_kd = std::min(cell.min_final_kd, final_kd);
    cell.max_final_kd = std::max(cell.max_final_kd, final_kd);
    cell.mean_reduction += static_cast<double>(t.initial_distance) - final_kd;
    cell.mean_rank_shift += static_cast<double>(t.rank_shift);
    cell.mean_flips += static_cast<double>(t.flips);
    cell.seconds += t.seconds;
  }
  const auto n = static_cast<double>(trials.size());
  cell.mean_final_kd /= n;
  cell.mean_reduction /= n;
  cell.mean_rank_shift /= n;
  cell.mean_flips /= n;
  cell.success_rate = success_rate(trials, criterion);
  return cell;
}

void run_jobs(std::size_t count, std::size_t jobs,
              const std::function<void(std::size_t)>& job) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = count;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        // Report the failure of the lowest job index, whatever the timing.
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

// Everything about one trial that does not depend on the algorithm or budget.
struct PreparedTrial {
  std::uint64_t data_seed = 0;
  std::uint64_t attack_seed = 0;
  std::optional<ComparisonDataset> dataset;
  Ranking initial = Ranking::identity(2);
  Ranking target = Ranking::identity(2);
  std::vector<VoterIndex> coalition;
  std::size_t pool_size = 0;
};

std::vector<PreparedTrial> prepare(const SweepSpec& spec) {
  std::vector<PreparedTrial> prepared(spec.trials);
  run_jobs(spec.trials, spec.jobs, [&](std::size_t t) {
    PreparedTrial& p = prepared[t];
    p.attack_seed = derive_seed(spec.seed, 1, t);
    if (spec.synthetic) {
      SyntheticSpec s = *spec.synthetic;
      p.data_seed = s.seed = derive_seed(spec.seed, 0, t);
      p.dataset = generate_synthetic(s).dataset;
    } else {
      p.dataset = *spec.dataset;
    }
    const auto fitted = fit(aggregate(*p.dataset), spec.attack.fit);
    p.initial = ranking_from_strengths(fitted.strengths);
    p.target = spec.target.resolve(p.initial);

    const std::size_t n = p.dataset->num_voters();
    if (spec.coalition_size == 0 || spec.coalition_size >= n) {
      p.coalition = all_voters(*p.dataset);
    } else {
      std::mt19937_64 rng(derive_seed(spec.seed, 2, t));
      p.coalition = uniform_coalitions(n)(spec.coalition_size, rng);
    }
    p.pool_size = coalition_pool(*p.dataset, p.coalition).size();
    if (p.pool_size == 0) {
      throw DomainError("trial " + std::to_string(t) + " has an empty coalition pool");
    }
  });
  return prepared;
}

struct Task {
  Algorithm algorithm;
  double fraction;
  std::size_t subsets;
  std::size_t iterations;
  std::size_t trial;
};

TrialResult run_trial(const SweepSpec& spec, const PreparedTrial& p, const Task& task) {
  const auto started = std::chrono::steady_clock::now();
  AttackConfig config = spec.attack;
  config.target = p.target;
  config.coalition = p.coalition;
  config.seed = p.attack_seed;
  config.subsets = task.subsets;
  config.iterations = task.iterations;
  config.budget = budget_for_fraction(task.fraction, p.pool_size);
  const auto result = run_attack(task.algorithm, *p.dataset, config);

  const auto final_ranking =
      ranking_from_strengths(fit(aggregate(result.manipulated), spec.attack.fit).strengths);
  const CandidateIndex star = p.target[0];

  TrialResult r;
  r.algorithm = task.algorithm;
  r.budget_fraction = task.fraction;
  r.subsets = task.subsets;
  r.iterations = task.iterations;
  r.trial = task.trial;
  r.data_seed = p.data_seed;
  r.attack_seed = p.attack_seed;
  r.budget = config.budget;
  r.initial_distance = result.initial_distance;
  r.final_distance = result.final_distance;
  r.flips = result.flips.size();
  r.rank_shift = static_cast<long>(p.initial.position_of(star)) -
                 static_cast<long>(final_ranking.position_of(star));
  if (spec.record_timing) {
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                    .count();
  }
  return r;
}

SweepTable run_tasks(const SweepSpec& spec, const std::vector<Task>& tasks) {
  const auto prepared = prepare(spec);
  SweepTable table;
  table.trials.resize(tasks.size());
  run_jobs(tasks.size(), spec.jobs, [&](std::size_t i) {
    table.trials[i] = run_trial(spec, prepared[tasks[i].trial], tasks[i]);
  });
  for (std::size_t begin = 0; begin < tasks.size(); begin += spec.trials) {
    table.cells.push_back(summarize(
        std::span(table.trials).subspan(begin, spec.trials), spec.criterion));
  }
  return table;
}

}  // namespace

SweepTable budget_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<Task> tasks;
  for (Algorithm a : spec.algorithms) {
    for (double f : spec.budget_fractions) {
      for (std::size_t t = 0; t < spec.trials; ++t) {
        tasks.push_back({a, f, spec.attack.subsets, spec.attack.iterations, t});
      }
    }
  }
  return run_tasks(spec, tasks);
}

SweepTable hyperparameter_sweep(SweepAxis axis, std::span<const std::size_t> values,
                                const SweepSpec& spec) {
  spec.validate();
  if (values.empty()) throw DomainError("hyperparameter sweep needs at least one value");
  for (std::size_t v : values) {
    if (v < 1) throw DomainError(std::string(axis_name(axis)) + " values must be >= 1");
  }
  std::vector<Task> tasks;
  for (Algorithm a : spec.algorithms) {
    for (std::size_t v : values) {
      const std::size_t b = axis == SweepAxis::kSubsets ? v : spec.attack.subsets;
      const std::size_t n = axis == SweepAxis::kIterations ? v : spec.attack.iterations;
      for (double f : spec.budget_fractions) {
        for (std::size_t t = 0; t < spec.trials; ++t) tasks.push_back({a, f, b, n, t});
      }
    }
  }
  return run_tasks(spec, tasks);
}

CoalitionSampler uniform_coalitions(std::size_t num_voters) {
  return [num_voters](std::size_t size, std::mt19937_64& rng) {
    std::vector<VoterIndex> all(num_voters);
    for (std::size_t v = 0; v < num_voters; ++v) all[v] = static_cast<VoterIndex>(v);
    std::vector<VoterIndex> picked;
    std::sample(all.begin(), all.end(), std::back_inserter(picked),
                std::min(size, num_voters), rng);
    return picked;
  };
}

ThresholdResult collusion_threshold(const ComparisonDataset& dataset,
                                    const ThresholdSpec& spec) {
  const std::size_t n = dataset.num_voters();
  if (n == 0) throw DomainError("collusion threshold needs at least one voter");
  if (spec.trials < 1) throw DomainError("collusion threshold needs at least one trial");
  const CoalitionSampler sampler = spec.sampler ? spec.sampler : uniform_coalitions(n);

  ThresholdResult out;
  AttackConfig full = spec.attack;
  full.coalition = all_voters(dataset);
  full.budget = dataset.size();
  full.seed = spec.seed;
  const auto everyone = run_attack(spec.algorithm, dataset, full);
  out.initial_distance = everyone.initial_distance;
  if (everyone.final_distance != 0) return out;
  out.reachable = true;

  auto succeeds = [&](std::size_t size) {
    ThresholdProbe probe{size, 0, spec.trials};
    for (std::size_t j = 0; j < spec.trials; ++j) {
      std::mt19937_64 rng(derive_seed(spec.seed, 2 * size, j));
      AttackConfig config = spec.attack;
      config.coalition = sampler(size, rng);
      config.budget = coalition_pool(dataset, config.coalition).size();
      config.seed = derive_seed(spec.seed, 2 * size + 1, j);
      if (run_attack(spec.algorithm, dataset, config).final_distance == 0) {
        ++probe.successes;
      }
    }
    out.probes.push_back(probe);
    return 2 * probe.successes >= probe.trials;
  };

  // The full electorate is known to succeed.
  std::size_t lo = 1, hi = n;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (succeeds(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  out.threshold = hi;
  out.fraction = static_cast<double>(hi) / static_cast<double>(n);
  return out;
}

namespace {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace

std::vector<std::string> csv_columns(bool with_hyperparameters) {
  std::vector<std::string> cols{"algorithm",      "budget_fraction", "trials",
                                "mean_final_kd",  "mean_reduction",  "mean_rank_shift",
                                "success_rate",   "mean_flips",      "seconds"};
  if (with_hyperparameters) {
    cols.emplace_back("subsets");
    cols.emplace_back("iterations");
  }
  return cols;
}

void write_csv(std::span<const CellResult> cells, std::ostream& out,
               bool with_hyperparameters) {
  const auto cols = csv_columns(with_hyperparameters);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& c : cells) {
    out << algorithm_name(c.algorithm) << "," << format_number(c.budget_fraction) << ","
        << c.trials << "," << format_number(c.mean_final_kd) << ","
        << format_number(c.mean_reduction) << "," << format_number(c.mean_rank_shift)
        << "," << format_number(c.success_rate) << "," << format_number(c.mean_flips)
        << "," << format_number(c.seconds);
    if (with_hyperparameters) out << "," << c.subsets << "," << c.iterations;
    out << "\n";
  }
}

std::string table_to_json(const SweepTable& table) {
  using nlohmann::json;
  json cells = json::array();
  for (const auto& c : table.cells) {
    cells.push_back({{"algorithm", algorithm_name(c.algorithm)},
                     {"budget_fraction", c.budget_fraction},
                     {"subsets", c.subsets},
                     {"iterations", c.iterations},
                     {"trials", c.trials},
                     {"mean_final_kd", c.mean_final_kd},
                     {"min_final_kd", c.min_final_kd},
                     {"max_final_kd", c.max_final_kd},
                     {"mean_reduction", c.mean_reduction},
                     {"mean_rank_shift", c.mean_rank_shift},
                     {"success_rate", c.success_rate},
                     {"mean_flips", c.mean_flips},
                     {"seconds", c.seconds}});
  }
  json trials = json::array();
  for (const auto& t : table.trials) {
    trials.push_back({{"algorithm", algorithm_name(t.algorithm)},
                      {"budget_fraction", t.budget_fraction},
                      {"subsets", t.subsets},
                      {"iterations", t.iterations},
                      {"trial", t.trial},
                      {"data_seed", t.data_seed},
                      {"attack_seed", t.attack_seed},
                      {"budget", t.budget},
                      {"initial_distance", t.initial_distance},
                      {"final_distance", t.final_distance},
                      {"flips", t.flips},
                      {"rank_shift", t.rank_shift},
                      {"seconds", t.seconds}});
  }
  return json{{"schema_version", kResultsSchemaVersion},
              {"cells", std::move(cells)},
              {"trials", std::move(trials)}}
      .dump(2);
}

SweepTable table_from_json(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid results JSON: ") + e.what(), 0);
  }
  try {
    const int version = doc.at("schema_version").get<int>();
    if (version != kResultsSchemaVersion) {
      throw ParseError("unsupported results schema version " + std::to_string(version), 0);
    }
    SweepTable table;
    for (const auto& j : doc.at("cells")) {
      CellResult c;
      c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
      j.at("budget_fraction").get_to(c.budget_fraction);
      j.at("subsets").get_to(c.subsets);
      j.at("iterations").get_to(c.iterations);
      j.at("trials").get_to(c.trials);
      j.at("mean_final_kd").get_to(c.mean_final_kd);
      j.at("min_final_kd").get_to(c.min_final_kd);
      j.at("max_final_kd").get_to(c.max_final_kd);
      j.at("mean_reduction").get_to(c.mean_reduction);
      j.at("mean_rank_shift").get_to(c.mean_rank_shift);
      j.at("success_rate").get_to(c.success_rate);
      j.at("mean_flips").get_to(c.mean_flips);
      j.at("seconds").get_to(c.seconds);
      table.cells.push_back(c);
    }
    for (const auto& j : doc.at("trials")) {
      TrialResult t;
      t.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
      j.at("budget_fraction").get_to(t.budget_fraction);
      j.at("subsets").get_to(t.subsets);
      j.at("iterations").get_to(t.iterations);
      j.at("trial").get_to(t.trial);
      j.at("data_seed").get_to(t.data_seed);
      j.at("attack_seed").get_to(t.attack_seed);
      j.at("budget").get_to(t.budget);
      j.at("initial_distance").get_to(t.initial_distance);
      j.at("final_distance").get_to(t.final_distance);
      j.at("flips").get_to(t.flips);
      j.at("rank_shift").get_to(t.rank_shift);
      j.at("seconds").get_to(t.seconds);
      table.trials.push_back(t);
    }
    return table;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed results JSON: ") + e.what(), 0);
  }
}

}  // namespace btattack
