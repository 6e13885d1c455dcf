#include "glorenz/errors.hpp"

namespace glorenz {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularLeaf: return "SingularLeafError";
    case ErrorKind::ParameterConsistency: return "ParameterConsistencyError";
    case ErrorKind::BlowUp: return "BlowUpError";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::ModelDegenerate: return "ModelDegenerateError";
    case ErrorKind::Infeasible: return "InfeasibleError";
    case ErrorKind::NonTermination: return "NonTerminationError";
    case ErrorKind::Configuration: return "ConfigurationError";
    case ErrorKind::Numeric: return "NumericError";
    case ErrorKind::ConstructionFailed: return "ConstructionFailedError";
    case ErrorKind::EmptySpec: return "EmptySpecError";
    case ErrorKind::NotExpanding: return "NotExpandingError";
    case ErrorKind::Degenerate: return "DegenerateError";
    case ErrorKind::InsufficientData: return "InsufficientDataError";
    case ErrorKind::SingularOrbit: return "SingularOrbitError";
    case ErrorKind::Sampling: return "SamplingError";
    case ErrorKind::Unsupported: return "UnsupportedError";
    case ErrorKind::Resource: return "ResourceError";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

}  // namespace glorenz
