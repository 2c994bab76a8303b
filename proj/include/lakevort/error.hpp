#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lakevort {

enum class ErrorKind {
  InvalidDepth,
  Geometry,
  Shape,
  Parameter,
  EmptyDomain,
  Solver,
  Consistency,
  Domain,
  Resolution,
  Singularity,
  UndefinedPart,
  Admissibility,
  Stencil,
  Experiment,
  Config,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (and the
// CLI exit path) can tell a bad input from a numerical breakdown.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lakevort
