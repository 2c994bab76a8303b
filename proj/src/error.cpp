#include "lakevort/error.hpp"

namespace lakevort {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidDepth: return "invalid-depth";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::EmptyDomain: return "empty-domain";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::Consistency: return "consistency";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::UndefinedPart: return "undefined-part";
    case ErrorKind::Admissibility: return "admissibility";
    case ErrorKind::Stencil: return "stencil";
    case ErrorKind::Experiment: return "experiment";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + message),
      kind_(kind) {}

}  // namespace lakevort
