#pragma once

#include <stdexcept>
#include <string>

namespace opd {

// Base for every error raised on bad data. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Mismatched or empty image / matrix dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Degenerate or invalid geometric input (zero axes, reflections, bad frames).
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Malformed files and schema violations.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace opd
