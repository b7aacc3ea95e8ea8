#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gaflab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad numeric input: non-finite values, malformed grids, wrong lengths.
class InputError : public Error {
 public:
  using Error::Error;
};

// Point where a closed form is not defined (log-type second derivative at 0).
class UndefinedPointError : public Error {
 public:
  using Error::Error;
};

// A mathematical premise of a bound or formula does not hold.
class DomainError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class ClassificationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment or optimizer configuration. Carries one message per
// offending field so callers can report them all at once.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : Error(join(issues)), issues_(std::move(issues)) {}
  explicit ConfigError(const std::string& issue)
      : ConfigError(std::vector<std::string>{issue}) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& s : issues) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

}  // namespace gaflab
