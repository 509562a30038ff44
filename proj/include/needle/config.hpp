#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "needle/errors.hpp"

namespace needle {

// Positions of n point charges on the unit needle [0,1]: strictly increasing,
// with the first charge pinned at exactly 0 and the last at exactly 1.
// Charge indices are 1-based in documentation and 0-based in code.
class ChargeConfiguration {
public:
  // Validates and takes ownership; throws Error on any invariant violation.
  static ChargeConfiguration from_positions(std::vector<double> positions);

  std::size_t n() const noexcept { return positions_.size(); }
  const std::vector<double>& positions() const noexcept { return positions_; }
  double operator[](std::size_t i) const noexcept { return positions_[i]; }

  bool operator==(const ChargeConfiguration& other) const = default;

private:
  explicit ChargeConfiguration(std::vector<double> positions)
      : positions_(std::move(positions)) {}

  std::vector<double> positions_;
};

// Interior coordinates a_2..a_{n-1} of a configuration: strictly increasing
// within the open interval (0,1). The pinned endpoints 0 and 1 are implicit.
// An empty coordinate list is the n=2 case (endpoints only).
class OpenSimplexPoint {
public:
  static OpenSimplexPoint from_interior(std::vector<double> interior);

  const std::vector<double>& interior() const noexcept { return interior_; }
  std::size_t interior_size() const noexcept { return interior_.size(); }
  // Charge count of the corresponding configuration.
  std::size_t n() const noexcept { return interior_.size() + 2; }

private:
  explicit OpenSimplexPoint(std::vector<double> interior)
      : interior_(std::move(interior)) {}

  std::vector<double> interior_;
};

// Full coordinate vector allowed to have ties: nondecreasing within [0,1].
class ClosedSimplexPoint {
public:
  static ClosedSimplexPoint from_coords(std::vector<double> coords);

  const std::vector<double>& coords() const noexcept { return coords_; }
  std::size_t n() const noexcept { return coords_.size(); }

private:
  explicit ClosedSimplexPoint(std::vector<double> coords)
      : coords_(std::move(coords)) {}

  std::vector<double> coords_;
};

struct ValidationResult {
  bool ok = false;
  Errc code = Errc::OutOfRange;  // first violated invariant when !ok
  std::size_t index = 0;         // 0-based coordinate where it was detected
  std::string message;
};

// Non-throwing check of the ChargeConfiguration invariants.
ValidationResult validate(std::span<const double> positions);

// Positions (i-1)/(n-1) for i = 1..n.
ChargeConfiguration equispaced(std::size_t n);

// Positions 1 - x_{n+1-k}; equilibria are fixed points of this map.
ChargeConfiguration reflect(const ChargeConfiguration& config);

// Conversions between full configurations and interior coordinates.
OpenSimplexPoint interior_of(const ChargeConfiguration& config);
ChargeConfiguration config_from_interior(const OpenSimplexPoint& point);

// Text serialization: one position per line, 17 significant digits.
// Round-trips exactly at double precision.
std::string to_text(const ChargeConfiguration& config);
ChargeConfiguration config_from_text(const std::string& text);

// JSON array form, e.g. "[0,0.5,1]". Also an exact round-trip.
std::string to_json_array(const ChargeConfiguration& config);
ChargeConfiguration config_from_json_array(const std::string& json);

// Lossless decimal rendering used by all file formats ("%.17g").
std::string format_double(double value);

}  // namespace needle
