#pragma once

#include <stdexcept>
#include <string>

namespace ptv {

// Bad user-supplied configuration (unknown key, malformed value, missing
// required option). The CLI maps this to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent data files (assets, datasets, CSV inputs).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside the physical domain of a model operation.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ptv
