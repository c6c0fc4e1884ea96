#pragma once

#include <stdexcept>
#include <string>

namespace icol {

enum class ErrorKind {
  kParameter,
  kDimension,
  kIndex,
  kSize,
  kMechanismContract,
  kParse,
  kIntegrity,
  kEmptyPanel,
  kIo,
};

// Base of every error raised by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define ICOL_DEFINE_ERROR(Name, Kind)                                  \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(Kind, what) {}      \
  }

ICOL_DEFINE_ERROR(ParameterError, ErrorKind::kParameter);
ICOL_DEFINE_ERROR(DimensionError, ErrorKind::kDimension);
ICOL_DEFINE_ERROR(IndexError, ErrorKind::kIndex);
ICOL_DEFINE_ERROR(SizeError, ErrorKind::kSize);
ICOL_DEFINE_ERROR(MechanismContractError, ErrorKind::kMechanismContract);
ICOL_DEFINE_ERROR(ParseError, ErrorKind::kParse);
ICOL_DEFINE_ERROR(IntegrityError, ErrorKind::kIntegrity);
ICOL_DEFINE_ERROR(EmptyPanelError, ErrorKind::kEmptyPanel);
ICOL_DEFINE_ERROR(IoError, ErrorKind::kIo);

#undef ICOL_DEFINE_ERROR

// Process exit code for an error kind: 2 validation, 3 data integrity, 4 I/O.
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse:
    case ErrorKind::kIntegrity:
    case ErrorKind::kEmptyPanel:
      return 3;
    case ErrorKind::kIo:
      return 4;
    default:
      return 2;
  }
}

}  // namespace icol
