#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hop {

enum class ErrorKind {
  InvalidArgument,
  InvalidInitialState,
  StepSizeUnderflow,
  NonFiniteState,
  FellOver,
  LegFullyCompressed,
  SingularMassMatrix,
  RankDeficientKKT,
  InfeasibleMoment,
  NonPositiveEquivalentGravity,
  InvalidConfig,
  NoApexReached,
  NoBracket,
  NotConverged,
  NumericalNoise,
  UncontrollableMap,
  NoLiftoff,
  ConfigError,
  GaitMismatch,
  EmptyRun,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-checkable error kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hop
