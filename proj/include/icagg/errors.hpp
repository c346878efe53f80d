#pragma once

#include <stdexcept>
#include <string>

namespace icagg {

// Invalid configuration: bad parameter strings, dimension mismatches,
// malformed tree specs. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unusable input data: CSV parse failures, empty or non-finite samples,
// row-count mismatches. CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Oracle incompatible with the requested copula/margin combination.
// CLI exit code 4.
class OracleError : public std::runtime_error {
 public:
  explicit OracleError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace icagg
