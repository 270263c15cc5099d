#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace acfh {

/// Violated precondition on an argument (mismatched grids, nonpositive shifts, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value fell outside the domain of a function, e.g. u outside (0,1).
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, std::size_t index)
      : std::domain_error(what + " (cell " + std::to_string(index) + ")"), index_(index) {}
  explicit DomainError(const std::string& what)
      : std::domain_error(what), index_(static_cast<std::size_t>(-1)) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// An iterative method exhausted its iteration budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A run produced a state the theory rules out (energy increase, bound violation).
class InvariantBreach : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace acfh
