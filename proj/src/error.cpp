#include "hcb/error.hpp"

#include <sstream>

namespace hcb {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParamDomain: return "ParamDomain";
    case ErrorCode::HardCoreViolation: return "HardCoreViolation";
    case ErrorCode::CalibrationFailure: return "CalibrationFailure";
    case ErrorCode::SeparationTooSmall: return "SeparationTooSmall";
    case ErrorCode::WindingMismatch: return "WindingMismatch";
    case ErrorCode::PeriodMismatch: return "PeriodMismatch";
    case ErrorCode::NonUniformInput: return "NonUniformInput";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ConservationBreach: return "ConservationBreach";
    case ErrorCode::NoCollisionDetected: return "NoCollisionDetected";
    case ErrorCode::NoOscillationDetected: return "NoOscillationDetected";
    case ErrorCode::TrackerLost: return "TrackerLost";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::MissingRequired: return "MissingRequired";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::FormatViolation: return "FormatViolation";
  }
  return "Unknown";
}

namespace {

std::string breach_message(const std::string& quantity, double drift, double time) {
  std::ostringstream os;
  os << "conservation breach in " << quantity << ": drift " << drift << " at t = " << time;
  return os.str();
}

}  // namespace

ConservationBreach::ConservationBreach(std::string quantity, double drift, double time)
    : Error(ErrorCode::ConservationBreach, breach_message(quantity, drift, time)),
      quantity_(std::move(quantity)),
      drift_(drift),
      time_(time) {}

}  // namespace hcb
