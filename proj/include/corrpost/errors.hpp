#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace corrpost {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input data cannot be summarized (constant column, too few rows, bad CSV).
class DegenerateData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A series hit its term budget before the stopping rule fired.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, std::size_t terms_used)
      : std::runtime_error(what), terms_used_(terms_used) {}

  std::size_t terms_used() const noexcept { return terms_used_; }

 private:
  std::size_t terms_used_;
};

/// Quadrature finished with an error estimate above its target.
class ToleranceNotMet : public std::runtime_error {
 public:
  ToleranceNotMet(const std::string& what, double value, double est_error)
      : std::runtime_error(what), value_(value), est_error_(est_error) {}

  double value() const noexcept { return value_; }
  double est_error() const noexcept { return est_error_; }

 private:
  double value_;
  double est_error_;
};

}  // namespace corrpost
