#pragma once

#include <stdexcept>
#include <string>

namespace bdg {

// Configuration / input validation problems. CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures (eigensolver breakdown, no root in bracket, divergence).
// CLI maps these to exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidLatticeError : ConfigError {
  explicit InvalidLatticeError(const std::string& msg) : ConfigError(msg) {}
};

struct OffLatticeError : std::runtime_error {
  explicit OffLatticeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CocycleInconsistencyError : NumericalError {
  explicit CocycleInconsistencyError(const std::string& msg) : NumericalError(msg) {}
};

struct ShapeError : std::invalid_argument {
  explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct GridMismatchError : std::invalid_argument {
  explicit GridMismatchError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct AdmissibilityError : NumericalError {
  explicit AdmissibilityError(const std::string& msg) : NumericalError(msg) {}
};

struct HypothesisError : std::invalid_argument {
  explicit HypothesisError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct EvaluationError : NumericalError {
  explicit EvaluationError(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace bdg
