#pragma once

#include <stdexcept>
#include <string>

namespace sselab {

enum class ErrorKind {
  DimensionMismatch,
  InvalidArgument,
  NonFinite,
  NotDiagonalizable,
  InvalidLaw,
  SimulationFailed,
  Config,
};

const char* to_string(ErrorKind kind);

/// Exception carrying a machine-readable category next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sselab
