#pragma once

#include <stdexcept>

namespace sparcs {

// Bad flags, missing or malformed configuration files, unknown model names.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data that cannot be turned into a valid Dataset or model input.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sparcs
