#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twinpoint {

enum class ErrorCode {
  SingularMatrix,
  DependentInput,
  NotAdmissible,
  NotCompanion,
  NotAnEigenvalue,
  EpsilonStraddles,
  SplittingDegenerate,
  NotSimple,
  ZeroC,
  RankDeficient,
  CorrectorFailure,
  NonSimpleEncounter,
  OutsideX,
  DegenerateDerivative,
  NotResolved,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Numerical failure raised by the library. The code identifies which
/// contract was violated; the message carries the diagnostic detail.
class NumericError : public std::runtime_error {
 public:
  NumericError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Malformed user input (config files, matrix text). Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace twinpoint
