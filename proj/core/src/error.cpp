#include "ipower/error.hpp"

namespace ipower {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonHermitian: return "NonHermitian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BadSubsystemLabel: return "BadSubsystemLabel";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::ZeroPurity: return "ZeroPurity";
    case ErrorKind::SubsystemANotQubit: return "SubsystemANotQubit";
    case ErrorKind::InvalidCorrelationTriple: return "InvalidCorrelationTriple";
    case ErrorKind::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorKind::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorKind::BadSetting: return "BadSetting";
    case ErrorKind::BasisMismatch: return "BasisMismatch";
    case ErrorKind::ZeroInformation: return "ZeroInformation";
    case ErrorKind::NotIdentifiable: return "NotIdentifiable";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace ipower
