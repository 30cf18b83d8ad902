#include "btattack/mle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "btattack/errors.hpp"

namespace btattack {

void FitConfig::validate() const {
  if (!(tol > 0.0)) throw DomainError("fit tolerance must be positive");
  if (max_iters < 1) throw DomainError("fit needs at least one iteration");
  if (!(regularization >= 0.0) || !std::isfinite(regularization)) {
    throw DomainError("regularization must be a finite value >= 0");
  }
}

namespace {

void require_same_size(const CountMatrix& counts, const StrengthVector& p) {
  if (counts.size() != p.size()) {
    throw DimensionError("count matrix is " + std::to_string(counts.size()) +
                         "x" + std::to_string(counts.size()) +
                         " but strength vector has length " +
                         std::to_string(p.size()));
  }
}

// Off-diagonal counts with the pseudo-count folded in.
struct Weights {
  std::size_t m;
  std::vector<double> w;

  Weights(const CountMatrix& counts, double eps)
      : m(counts.size()), w(m * m, 0.0) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j) w[i * m + j] = static_cast<double>(counts.at(i, j)) + eps;
      }
    }
  }

  double at(std::size_t i, std::size_t j) const { return w[i * m + j]; }
};

double objective(const Weights& w, std::span<const double> p) {
  double ll = 0.0;
  for (std::size_t i = 0; i < w.m; ++i) {
    for (std::size_t j = i + 1; j < w.m; ++j) {
      const double nij = w.at(i, j);
      const double nji = w.at(j, i);
      if (nij == 0.0 && nji == 0.0) continue;
      const double log_sum = std::log(p[i] + p[j]);
      if (nij != 0.0) ll += nij * (std::log(p[i]) - log_sum);
      if (nji != 0.0) ll += nji * (std::log(p[j]) - log_sum);
    }
  }
  return ll;
}

// Tarjan's algorithm over the graph i -> j iff has_edge(i, j). Components come
// out in reverse topological order.
std::vector<std::vector<std::size_t>> strongly_connected_components(
    std::size_t m, const std::function<bool(std::size_t, std::size_t)>& has_edge) {
  std::vector<std::vector<std::size_t>> components;
  std::vector<std::size_t> index(m, m), lowlink(m, 0), stack;
  std::vector<bool> on_stack(m, false);
  std::size_t next_index = 0;

  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = lowlink[v] = next_index++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t u = 0; u < m; ++u) {
      if (u == v || !has_edge(v, u)) continue;
      if (index[u] == m) {
        visit(u);
        lowlink[v] = std::min(lowlink[v], lowlink[u]);
      } else if (on_stack[u]) {
        lowlink[v] = std::min(lowlink[v], index[u]);
      }
    }
    if (lowlink[v] == index[v]) {
      std::vector<std::size_t> component;
      std::size_t u;
      do {
        u = stack.back();
        stack.pop_back();
        on_stack[u] = false;
        component.push_back(u);
      } while (u != v);
      std::sort(component.begin(), component.end());
      components.push_back(std::move(component));
    }
  };
  for (std::size_t v = 0; v < m; ++v) {
    if (index[v] == m) visit(v);
  }
  return components;
}

ConnectivityReport connectivity(
    std::size_t m, const std::function<bool(std::size_t, std::size_t)>& has_edge) {
  auto sccs = strongly_connected_components(m, has_edge);
  std::reverse(sccs.begin(), sccs.end());

  std::vector<std::size_t> component_of(m);
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    for (std::size_t v : sccs[c]) component_of[v] = c;
  }
  ConnectivityReport report;
  report.strongly_connected = sccs.size() == 1;
  report.components.resize(sccs.size());
  std::vector<bool> has_in(sccs.size(), false), has_out(sccs.size(), false);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j || !has_edge(i, j)) continue;
      if (component_of[i] != component_of[j]) {
        has_out[component_of[i]] = true;
        has_in[component_of[j]] = true;
      }
    }
  }
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    report.components[c].members = std::move(sccs[c]);
    report.components[c].source = !has_in[c];
    report.components[c].sink = !has_out[c];
  }
  return report;
}

FitResult run_mm(const CountMatrix& counts, const FitConfig& config,
                 std::vector<double> p) {
  config.validate();
  const std::size_t m = counts.size();
  const Weights w(counts, config.regularization);

  const auto report =
      connectivity(m, [&](std::size_t i, std::size_t j) { return w.at(i, j) > 0.0; });
  if (!report.strongly_connected) {
    std::vector<std::vector<std::size_t>> groups;
    for (const auto& c : report.components) groups.push_back(c.members);
    throw NonIdentifiableError(
        "maximum-likelihood strengths do not exist: " + report.describe(), groups);
  }

  std::vector<double> wins(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) wins[i] += w.at(i, j);
  }

  FitResult result{StrengthVector(p), 0.0, 0, false, 0.0, {}};
  if (config.record_trace) result.trace.push_back(objective(w, p));

  std::vector<double> next(m);
  for (std::size_t iter = 1; iter <= config.max_iters; ++iter) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double denom = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        const double n = w.at(i, j) + w.at(j, i);
        if (n != 0.0) denom += n / (p[i] + p[j]);
      }
      next[i] = wins[i] / denom;
      sum += next[i];
    }
    double change = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      next[i] /= sum;
      change = std::max(change, std::abs(next[i] - p[i]));
    }
    p.swap(next);
    result.iterations = iter;
    result.last_change = change;
    if (config.record_trace) result.trace.push_back(objective(w, p));
    if (change <= config.tol) {
      result.converged = true;
      break;
    }
  }
  result.strengths = StrengthVector::normalized(std::move(p));
  result.log_likelihood = objective(w, result.strengths.values());
  return result;
}

}  // namespace

double log_likelihood(const CountMatrix& counts, const StrengthVector& p) {
  require_same_size(counts, p);
  return objective(Weights(counts, 0.0), p.values());
}

FitResult fit(const CountMatrix& counts, const FitConfig& config) {
  const std::size_t m = counts.size();
  return run_mm(counts, config, std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

FitResult fit(const CountMatrix& counts, const FitConfig& config,
              const StrengthVector& start) {
  require_same_size(counts, start);
  return run_mm(counts, config,
                std::vector<double>(start.values().begin(), start.values().end()));
}

std::vector<double> gradient(const CountMatrix& counts, const StrengthVector& p) {
  require_same_size(counts, p);
  const std::size_t m = counts.size();
  std::vector<double> g(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const auto n = static_cast<double>(counts.pair_total(i, j));
      g[i] += static_cast<double>(counts.at(i, j)) - n * p[i] / (p[i] + p[j]);
    }
  }
  return g;
}

Eigen::MatrixXd hessian(const CountMatrix& counts, const StrengthVector& p) {
  require_same_size(counts, p);
  const auto m = static_cast<Eigen::Index>(counts.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) continue;
      const auto n = static_cast<double>(counts.pair_total(i, j));
      const double s = p[i] + p[j];
      const double v = n * p[i] * p[j] / (s * s);
      h(i, j) = v;
      h(i, i) -= v;
    }
  }
  return h;
}

ConnectivityReport check_connectivity(const CountMatrix& counts) {
  return connectivity(counts.size(), [&](std::size_t i, std::size_t j) {
    return counts.at(i, j) > 0;
  });
}

std::string ConnectivityReport::describe(const CandidateSet* names) const {
  std::ostringstream out;
  if (strongly_connected) {
    out << "comparison graph is strongly connected";
    return out.str();
  }
  out << "comparison graph splits into " << components.size()
      << " strongly connected groups:";
  for (const auto& c : components) {
    out << " {";
    for (std::size_t k = 0; k < c.members.size(); ++k) {
      if (k) out << ",";
      if (names != nullptr) {
        out << names->name(static_cast<CandidateIndex>(c.members[k]));
      } else {
        out << c.members[k];
      }
    }
    out << "}";
    if (c.sink) out << "[never wins outside]";
    else if (c.source) out << "[never loses outside]";
  }
  return out.str();
}

}  // namespace btattack
