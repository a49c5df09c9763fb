#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uavcache {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

/// A requirement that cannot be met (e.g. an uncached content whose fronthaul
/// delay alone exhausts the delay budget).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A property the pipeline must maintain was broken during a run.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Configuration parse or validation failure. Carries every violation found,
/// each prefixed by the offending field path.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) out += "\n  " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace uavcache
