#pragma once

#include <stdexcept>
#include <string>

namespace homspace {

// Base of every error raised by the library. `stage()` names the pipeline
// stage that produced it ("numkernel", "liealg", "split", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

#define HOMSPACE_DEFINE_ERROR(Name)                               \
  class Name : public Error {                                     \
   public:                                                        \
    using Error::Error;                                           \
  }

HOMSPACE_DEFINE_ERROR(DimensionError);
HOMSPACE_DEFINE_ERROR(SymmetryError);
HOMSPACE_DEFINE_ERROR(ConstructionError);
HOMSPACE_DEFINE_ERROR(EmbeddingError);
HOMSPACE_DEFINE_ERROR(ConsistencyError);
HOMSPACE_DEFINE_ERROR(ContainmentError);
HOMSPACE_DEFINE_ERROR(InvarianceError);
HOMSPACE_DEFINE_ERROR(DecompositionError);
HOMSPACE_DEFINE_ERROR(ParameterError);
HOMSPACE_DEFINE_ERROR(WellDefinednessError);
HOMSPACE_DEFINE_ERROR(NormalizerMembershipError);
HOMSPACE_DEFINE_ERROR(ConfigError);

#undef HOMSPACE_DEFINE_ERROR

// Raised when an operator that must be a metric is not positive definite.
class PositivityError : public Error {
 public:
  PositivityError(std::string stage, const std::string& what, double smallest)
      : Error(std::move(stage), what + " (smallest eigenvalue " + std::to_string(smallest) + ")"),
        smallest_eigenvalue_(smallest) {}

  double smallest_eigenvalue() const noexcept { return smallest_eigenvalue_; }

 private:
  double smallest_eigenvalue_;
};

}  // namespace homspace
