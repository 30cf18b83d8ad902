#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace btattack {

// Argument sizes disagree (e.g. rankings over different candidate counts).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value lies outside the domain of the operation (non-positive strength,
// malformed configuration, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Position or candidate index out of range.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// The maximum-likelihood estimate does not exist because the comparison graph
// is not strongly connected. `components` lists the strongly connected
// components of the graph, in topological order of the condensation.
class NonIdentifiableError : public std::runtime_error {
 public:
  NonIdentifiableError(const std::string& what,
                       std::vector<std::vector<std::size_t>> components)
      : std::runtime_error(what), components_(std::move(components)) {}

  const std::vector<std::vector<std::size_t>>& components() const {
    return components_;
  }

 private:
  std::vector<std::vector<std::size_t>> components_;
};

// The Hessian is singular beyond its known null direction. `cut` is the
// candidate group on one side of the weakest comparison-graph bottleneck.
class IllConditionedError : public std::runtime_error {
 public:
  IllConditionedError(const std::string& what, std::vector<std::size_t> cut)
      : std::runtime_error(what), cut_(std::move(cut)) {}

  const std::vector<std::size_t>& cut() const { return cut_; }

 private:
  std::vector<std::size_t> cut_;
};

// Text input could not be parsed. `line` is 1-based; 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : std::runtime_error(line == 0 ? message
                                     : "line " + std::to_string(line) + ": " +
                                           message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace btattack
