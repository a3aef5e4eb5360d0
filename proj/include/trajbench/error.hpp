#pragma once

#include <stdexcept>
#include <string>

namespace tb {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file. The message carries the position
// ("line 3: expected 8 fields, got 7" / "row 5: reflection, not rotation").
class ParseError : public Error {
 public:
  using Error::Error;
};

// Invalid MetricConfig; the message lists every violated constraint by name.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Scale recovery found no usable displacement between the anchor frames.
// Signals a static or collapsed prediction; such scenarios are still scored
// (against a stationary point at the ground-truth start), not skipped.
class NearZeroDisplacement : public Error {
 public:
  using Error::Error;
};

// Neither displacement nor orientation yields an initial heading.
class UndefinedHeading : public Error {
 public:
  using Error::Error;
};

}  // namespace tb
