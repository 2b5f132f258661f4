#pragma once

#include <stdexcept>
#include <string>

namespace sdq {

/// Broad failure class, used by the CLI to pick an exit code.
enum class ErrorKind { Validation, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define SDQ_DEFINE_ERROR(Name, Kind)                                              \
  class Name : public Error {                                                     \
   public:                                                                        \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {}      \
  };

SDQ_DEFINE_ERROR(ParseError, Validation)
SDQ_DEFINE_ERROR(ValidationError, Validation)
SDQ_DEFINE_ERROR(InvalidCurrent, Validation)
SDQ_DEFINE_ERROR(IncompleteRecord, Validation)
SDQ_DEFINE_ERROR(EmptyModeSet, Validation)
SDQ_DEFINE_ERROR(ZeroFrequency, Validation)
SDQ_DEFINE_ERROR(SingularSusceptibility, Numerical)
SDQ_DEFINE_ERROR(StepFailure, Numerical)
SDQ_DEFINE_ERROR(NonPhysicalState, Numerical)

#undef SDQ_DEFINE_ERROR

}  // namespace sdq
