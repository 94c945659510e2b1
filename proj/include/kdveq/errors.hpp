#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kdveq {

enum class ErrorKind {
  Syntax,
  UnknownIdentifier,
  UnboundSymbol,
  Domain,
  DivisionByZero,
  InvalidEquation,
  UnboundParameter,
  NotS2,
  OutsideSubclass,
  SingularPoint,
  InsufficientSamples,
  ArityMismatch,
  UndeterminedResidual,
  UnknownForm,
  ModelFormat,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `offset()` is meaningful for
/// syntax errors only (byte offset into the parsed text).
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Error(ErrorKind kind, const std::string& message, std::size_t offset = npos)
      : std::runtime_error(message), kind_(kind), offset_(offset) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

 private:
  ErrorKind kind_;
  std::size_t offset_;
};

}  // namespace kdveq
