#pragma once

#include <stdexcept>
#include <string>

namespace needle {

enum class Errc {
  EndpointNotPinned,
  OrderViolation,
  OutOfRange,
  InvalidCount,
  IndexOutOfRange,
  NotConverged,
  StepUnderflow,
  OrderingBreached,
  InsufficientSamples,
  CountNotDyadic,
  ResolutionTooCoarse,
  PointOnCharge,
  PointOnNeedle,
  Endpoint,
  NonpositiveArgument,
  DomainViolation,
  IoFailure,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message);
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace needle
