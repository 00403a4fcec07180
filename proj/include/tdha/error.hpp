#pragma once

#include <stdexcept>
#include <string>

namespace tdha {

/// Base of every error raised by the library. `name()` is stable and is what
/// the CLI prints, so callers can match on it without RTTI.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* name() const noexcept { return "Error"; }
};

#define TDHA_DEFINE_ERROR(Name, Base)                                   \
  class Name : public Base {                                            \
   public:                                                              \
    using Base::Base;                                                   \
    const char* name() const noexcept override { return #Name; }        \
  }

TDHA_DEFINE_ERROR(InvalidInputError, Error);
TDHA_DEFINE_ERROR(DegenerateInputError, InvalidInputError);
TDHA_DEFINE_ERROR(DomainError, Error);
TDHA_DEFINE_ERROR(ShapeError, Error);
TDHA_DEFINE_ERROR(ConvergenceError, Error);
TDHA_DEFINE_ERROR(FormatError, Error);
TDHA_DEFINE_ERROR(InvariantViolation, Error);

// Bundle / file errors.
TDHA_DEFINE_ERROR(DataError, Error);
TDHA_DEFINE_ERROR(IoError, DataError);
TDHA_DEFINE_ERROR(ValidationError, DataError);
TDHA_DEFINE_ERROR(ManifestError, DataError);
TDHA_DEFINE_ERROR(BadMagicError, DataError);
TDHA_DEFINE_ERROR(UnsupportedVersionError, DataError);
TDHA_DEFINE_ERROR(TruncatedPayloadError, DataError);
TDHA_DEFINE_ERROR(LabelOutOfRangeError, DataError);

#undef TDHA_DEFINE_ERROR

}  // namespace tdha
