#pragma once

#include <stdexcept>
#include <string>

namespace lnaforge {

enum class ErrorCode {
  ParseError,
  MissingField,
  UnknownField,
  InvalidValue,
  InvalidBand,
  InconsistentLimits,
  UnrealizableGeometry,
  EmptyGrid,
  EmptyLibrary,
  LimitViolation,
  ModeUnsupported,
  NonPositiveInput,
  IoError,
};

const char* to_string(ErrorCode code);

// Single exception type for the engine; `code()` lets callers branch without
// parsing messages. `field()` names the offending field or bound when known.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string field, const std::string& what)
      : std::runtime_error(what), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace lnaforge
