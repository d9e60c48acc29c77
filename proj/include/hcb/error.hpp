#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hcb {

enum class ErrorCode {
  InvalidArgument,
  ParamDomain,
  HardCoreViolation,
  CalibrationFailure,
  SeparationTooSmall,
  WindingMismatch,
  PeriodMismatch,
  NonUniformInput,
  NonFinite,
  ConservationBreach,
  NoCollisionDetected,
  NoOscillationDetected,
  TrackerLost,
  UnknownKey,
  DomainViolation,
  MissingRequired,
  IoFailure,
  FormatViolation,
};

std::string_view to_string(ErrorCode code) noexcept;

// Base exception for every failure raised by the library. The code is what
// the CLI reports in its machine-readable error output.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ConservationBreach : public Error {
 public:
  ConservationBreach(std::string quantity, double drift, double time);

  const std::string& quantity() const noexcept { return quantity_; }
  double drift() const noexcept { return drift_; }
  double time() const noexcept { return time_; }

 private:
  std::string quantity_;
  double drift_;
  double time_;
};

}  // namespace hcb
