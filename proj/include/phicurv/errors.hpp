#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phicurv {

enum class ErrorKind {
  SyntaxError,
  UnknownIdentifier,
  ArityError,
  DomainError,
  DivisionByZeroJet,
  MixedBasePoint,
  IndexOutOfRange,
  MetricNotPositiveDefinite,
  InsufficientJetOrder,
  DimensionTooLow,
  TargetChartExit,
  ParseError,
  ValidationError,
  NotASoliton,
  NotHarmonicEinstein,
  MaxIterations,
  SingularNormalEquations,
  UnknownIdentityId,
  UsageError,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the whole engine; `kind` discriminates, `offset`
/// carries a byte position when the error originates from parsed text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::ptrdiff_t offset = -1)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        offset_(offset) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Byte offset into the source text, or -1 when not applicable.
  std::ptrdiff_t offset() const noexcept { return offset_; }

 private:
  ErrorKind kind_;
  std::ptrdiff_t offset_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string message,
                              std::ptrdiff_t offset = -1) {
  throw Error(kind, std::move(message), offset);
}

}  // namespace phicurv
