#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace decay {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated by its arguments.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Scenario text or an ingested data file could not be turned into a valid
/// configuration. `line()` is 0 when the problem is not tied to one line.
class ConfigError : public Error {
public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

/// A propagation or solver detected a state it cannot continue from
/// (norm growth, density at the grid edge, ...).
class NumericalAbort : public Error {
public:
  using Error::Error;
};

/// Collects non-fatal warnings raised while computing a result.
class Diagnostics {
public:
  void warn(std::string message) { warnings_.push_back(std::move(message)); }
  const std::vector<std::string>& warnings() const { return warnings_; }
  bool empty() const { return warnings_.empty(); }
  void merge(const Diagnostics& other) {
    warnings_.insert(warnings_.end(), other.warnings_.begin(), other.warnings_.end());
  }

private:
  std::vector<std::string> warnings_;
};

inline void warn(Diagnostics* diag, std::string message) {
  if (diag) diag->warn(std::move(message));
}

}  // namespace decay
