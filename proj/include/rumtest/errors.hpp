#ifndef RUMTEST_ERRORS_HPP
#define RUMTEST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rumtest {

/// Bad user input (malformed file, nonpositive price, invalid option).
/// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Observation-level data problem (bundle off its budget, empty period).
class DataError : public ValidationError {
 public:
  explicit DataError(const std::string& what) : ValidationError(what) {}
};

/// Numerical failure inside a solver (non-convergence, infeasible system
/// that should have been feasible). Maps to exit code 1.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Internal consistency failure; indicates a bug, not bad input.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace rumtest

#endif
