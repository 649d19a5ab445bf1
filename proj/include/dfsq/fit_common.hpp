#pragma once

#include <stdexcept>
#include <string_view>

namespace dfsq {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few points, or the abscissae do not cover what the model needs.
class InsufficientDataError : public FitError {
 public:
  using FitError::FitError;
};

/// Abscissae are collinear / coincident so the design matrix is singular.
class DegenerateDesignError : public FitError {
 public:
  using FitError::FitError;
};

enum class FitStatus {
  converged,
  max_iterations,  // best iterate returned
  degenerate,      // model parameter not identified by the data
};

constexpr std::string_view to_string(FitStatus s) {
  switch (s) {
    case FitStatus::converged: return "converged";
    case FitStatus::max_iterations: return "max_iterations";
    case FitStatus::degenerate: return "degenerate";
  }
  return "unknown";
}

}  // namespace dfsq
