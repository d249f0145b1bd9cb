#pragma once

#include <stdexcept>
#include <string>

namespace sasdp {

/// Base class for failures of the numerical machinery (as opposed to
/// contract violations, which throw std::invalid_argument).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Requested tolerances cannot be met within the configured work limits.
class NonConvergenceError : public NumericError {
 public:
  explicit NonConvergenceError(const std::string& what) : NumericError(what) {}
};

/// The asymptotic tail series was requested at an argument where its term
/// magnitudes do not decrease; the expansion is unusable there.
class SeriesDivergenceError : public NumericError {
 public:
  explicit SeriesDivergenceError(const std::string& what) : NumericError(what) {}
};

/// The privacy-budget search hit its maximum radius without classifying the
/// loss curve as either decaying or diverging.
class SearchExhaustedError : public NumericError {
 public:
  explicit SearchExhaustedError(const std::string& what) : NumericError(what) {}
};

/// Scale calibration could not bracket the requested privacy budget.
class BracketError : public NumericError {
 public:
  explicit BracketError(const std::string& what) : NumericError(what) {}
};

}  // namespace sasdp
