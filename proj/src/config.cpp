#include "needle/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace needle {

ValidationResult validate(std::span<const double> positions) {
  const std::size_t n = positions.size();
  if (n < 2) {
    return {false, Errc::InvalidCount, 0, "need at least 2 charges"};
  }
  if (positions.front() != 0.0) {
    return {false, Errc::EndpointNotPinned, 0, "first position must be exactly 0"};
  }
  if (positions.back() != 1.0) {
    return {false, Errc::EndpointNotPinned, n - 1, "last position must be exactly 1"};
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(positions[i] >= 0.0 && positions[i] <= 1.0)) {
      std::ostringstream msg;
      msg << "position " << i << " outside [0,1]";
      return {false, Errc::OutOfRange, i, msg.str()};
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(positions[i] < positions[i + 1])) {
      std::ostringstream msg;
      msg << "positions " << i << " and " << i + 1 << " not strictly increasing";
      return {false, Errc::OrderViolation, i + 1, msg.str()};
    }
  }
  return {true, Errc::OutOfRange, 0, ""};
}

ChargeConfiguration ChargeConfiguration::from_positions(
    std::vector<double> positions) {
  ValidationResult r = validate(positions);
  if (!r.ok) fail(r.code, r.message);
  return ChargeConfiguration(std::move(positions));
}

OpenSimplexPoint OpenSimplexPoint::from_interior(std::vector<double> interior) {
  for (std::size_t i = 0; i < interior.size(); ++i) {
    if (!(interior[i] > 0.0 && interior[i] < 1.0)) {
      fail(Errc::OutOfRange, "interior coordinate outside (0,1)");
    }
    if (i > 0 && !(interior[i - 1] < interior[i])) {
      fail(Errc::OrderViolation, "interior coordinates not strictly increasing");
    }
  }
  return OpenSimplexPoint(std::move(interior));
}

ClosedSimplexPoint ClosedSimplexPoint::from_coords(std::vector<double> coords) {
  if (coords.size() < 2) fail(Errc::InvalidCount, "need at least 2 coordinates");
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!(coords[i] >= 0.0 && coords[i] <= 1.0)) {
      fail(Errc::OutOfRange, "coordinate outside [0,1]");
    }
    if (i > 0 && coords[i] < coords[i - 1]) {
      fail(Errc::OrderViolation, "coordinates decrease");
    }
  }
  return ClosedSimplexPoint(std::move(coords));
}

ChargeConfiguration equispaced(std::size_t n) {
  if (n < 2) fail(Errc::InvalidCount, "equispaced needs n >= 2");
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  }
  p.front() = 0.0;
  p.back() = 1.0;
  return ChargeConfiguration::from_positions(std::move(p));
}

ChargeConfiguration reflect(const ChargeConfiguration& config) {
  const std::size_t n = config.n();
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = 1.0 - config[n - 1 - i];
  }
  p.front() = 0.0;
  p.back() = 1.0;
  return ChargeConfiguration::from_positions(std::move(p));
}

OpenSimplexPoint interior_of(const ChargeConfiguration& config) {
  const auto& x = config.positions();
  return OpenSimplexPoint::from_interior(
      std::vector<double>(x.begin() + 1, x.end() - 1));
}

ChargeConfiguration config_from_interior(const OpenSimplexPoint& point) {
  std::vector<double> p;
  p.reserve(point.n());
  p.push_back(0.0);
  p.insert(p.end(), point.interior().begin(), point.interior().end());
  p.push_back(1.0);
  return ChargeConfiguration::from_positions(std::move(p));
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string to_text(const ChargeConfiguration& config) {
  std::string out;
  for (double x : config.positions()) {
    out += format_double(x);
    out += '\n';
  }
  return out;
}

namespace {

double parse_strict_double(const std::string& token) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || errno == ERANGE) {
    fail(Errc::IoFailure, "malformed number '" + token + "'");
  }
  return v;
}

}  // namespace

ChargeConfiguration config_from_text(const std::string& text) {
  std::vector<double> p;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    p.push_back(parse_strict_double(line));
  }
  return ChargeConfiguration::from_positions(std::move(p));
}

std::string to_json_array(const ChargeConfiguration& config) {
  std::string out = "[";
  const auto& x = config.positions();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(x[i]);
  }
  out += ']';
  return out;
}

ChargeConfiguration config_from_json_array(const std::string& json) {
  std::vector<double> p;
  std::string token;
  bool inside = false;
  bool closed = false;
  for (char c : json) {
    if (!inside) {
      if (c == '[') {
        inside = true;
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        fail(Errc::IoFailure, "expected JSON array");
      }
      continue;
    }
    if (closed) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        fail(Errc::IoFailure, "trailing content after JSON array");
      }
      continue;
    }
    if (c == ',' || c == ']') {
      std::erase_if(token, [](char t) {
        return std::isspace(static_cast<unsigned char>(t)) != 0;
      });
      if (!token.empty()) p.push_back(parse_strict_double(token));
      token.clear();
      if (c == ']') closed = true;
    } else {
      token += c;
    }
  }
  if (!inside || !closed) fail(Errc::IoFailure, "unterminated JSON array");
  return ChargeConfiguration::from_positions(std::move(p));
}

}  // namespace needle
