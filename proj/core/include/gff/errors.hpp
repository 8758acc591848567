#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gff {

// Bad arguments, bad config values, or preconditions violated by the caller.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Aggregated config-file violations; every problem is reported, each with its
// line number, rather than stopping at the first one.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : ValidationError(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "config validation failed:";
    for (const auto& m : v) {
      s += "\n  ";
      s += m;
    }
    return s;
  }
  std::vector<std::string> violations_;
};

// A hard size or budget cap was exceeded (dense matrix cap, enumeration
// budget, walk-length guard).
class ResourceCapError : public std::runtime_error {
 public:
  explicit ResourceCapError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure that survived the documented retry policy
// (e.g. a Cholesky pivot failure after the one-shot jitter).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A truncated point configuration came out empty where atoms are required.
class EmptyConfigurationError : public std::runtime_error {
 public:
  explicit EmptyConfigurationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gff
