#pragma once

#include <stdexcept>
#include <string>

namespace rigidlab {

/// Malformed or inconsistent experiment configuration (manifest, table file,
/// cocycle table lookups). Maps to CLI exit code 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation would exceed a configured resource bound (modulus, tower
/// height, matrix size). Maps to CLI exit code 4.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rigidlab
