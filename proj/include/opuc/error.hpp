#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace opuc {

enum class ErrorKind {
  NonNormalizable,
  NegativeInput,
  BoundaryPoint,
  NotSzego,
  GridMismatch,
  AliasRisk,
  BadNormalization,
  DivisionBlowup,
  ParameterEscape,
  NearZeroArgument,
  ContractivityLoss,
  DegenerateDenominator,
  PositivityLoss,
  OutOfRange,
  NotOnBoundary,
  InvalidArgument,
  Config,
  Io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonNormalizable: return "NonNormalizable";
    case ErrorKind::NegativeInput: return "NegativeInput";
    case ErrorKind::BoundaryPoint: return "BoundaryPoint";
    case ErrorKind::NotSzego: return "NotSzego";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::AliasRisk: return "AliasRisk";
    case ErrorKind::BadNormalization: return "BadNormalization";
    case ErrorKind::DivisionBlowup: return "DivisionBlowup";
    case ErrorKind::ParameterEscape: return "ParameterEscape";
    case ErrorKind::NearZeroArgument: return "NearZeroArgument";
    case ErrorKind::ContractivityLoss: return "ContractivityLoss";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::PositivityLoss: return "PositivityLoss";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NotOnBoundary: return "NotOnBoundary";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable error kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace opuc
