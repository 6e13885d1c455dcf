#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace glorenz {

enum class ErrorKind {
  SingularLeaf,          // point on the leaf x = 0
  ParameterConsistency,  // constants produce images outside the section
  BlowUp,                // ODE state left the admissible ball
  Domain,                // argument outside the operation's domain
  ModelDegenerate,       // required preimage does not exist
  Infeasible,            // no cut parameter satisfies the constraints
  NonTermination,        // iteration cap exceeded
  Configuration,         // inconsistent or missing configuration
  Numeric,               // iterative solver failed to converge
  ConstructionFailed,    // Cantor construction lost every candidate
  EmptySpec,             // direct builder found no cylinder
  NotExpanding,          // branch derivative not above one
  Degenerate,            // degenerate point cloud
  InsufficientData,
  SingularOrbit,
  Sampling,
  Unsupported,
  Resource,
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace glorenz
