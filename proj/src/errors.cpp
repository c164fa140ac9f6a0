#include "hop/errors.hpp"

namespace hop {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidInitialState: return "InvalidInitialState";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::FellOver: return "FellOver";
    case ErrorKind::LegFullyCompressed: return "LegFullyCompressed";
    case ErrorKind::SingularMassMatrix: return "SingularMassMatrix";
    case ErrorKind::RankDeficientKKT: return "RankDeficientKKT";
    case ErrorKind::InfeasibleMoment: return "InfeasibleMoment";
    case ErrorKind::NonPositiveEquivalentGravity: return "NonPositiveEquivalentGravity";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::NoApexReached: return "NoApexReached";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::NumericalNoise: return "NumericalNoise";
    case ErrorKind::UncontrollableMap: return "UncontrollableMap";
    case ErrorKind::NoLiftoff: return "NoLiftoff";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::GaitMismatch: return "GaitMismatch";
    case ErrorKind::EmptyRun: return "EmptyRun";
  }
  return "Unknown";
}

}  // namespace hop
