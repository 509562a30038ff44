#include "needle/errors.hpp"

namespace needle {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::EndpointNotPinned: return "EndpointNotPinned";
    case Errc::OrderViolation: return "OrderViolation";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::InvalidCount: return "InvalidCount";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NotConverged: return "NotConverged";
    case Errc::StepUnderflow: return "StepUnderflow";
    case Errc::OrderingBreached: return "OrderingBreached";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::CountNotDyadic: return "CountNotDyadic";
    case Errc::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case Errc::PointOnCharge: return "PointOnCharge";
    case Errc::PointOnNeedle: return "PointOnNeedle";
    case Errc::Endpoint: return "Endpoint";
    case Errc::NonpositiveArgument: return "NonpositiveArgument";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message),
      code_(code) {}

void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace needle
