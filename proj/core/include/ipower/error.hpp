#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ipower {

enum class ErrorKind {
  NonHermitian,
  NoConvergence,
  NotSquare,
  NonFinite,
  DimensionMismatch,
  BadSubsystemLabel,
  InvalidState,
  ZeroPurity,
  SubsystemANotQubit,
  InvalidCorrelationTriple,
  ParameterOutOfRange,
  NotPositiveSemidefinite,
  BadSetting,
  BasisMismatch,
  ZeroInformation,
  NotIdentifiable,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ipower
