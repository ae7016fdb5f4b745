#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lagstokes {

enum class ErrorKind {
  InvalidInput,
  InvalidConfiguration,
  NoContraction,
  Divergence,
  BoundViolation,
  UnboundedSearch,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Fixed-point iteration ran out of iterations. Carries the residual history
/// so callers can decide whether to shrink the window and retry.
class NoContractionError : public Error {
 public:
  NoContractionError(const std::string& message, std::vector<double> residuals)
      : Error(ErrorKind::NoContraction, message), residuals_(std::move(residuals)) {}

  const std::vector<double>& residuals() const noexcept { return residuals_; }
  double final_residual() const noexcept {
    return residuals_.empty() ? 0.0 : residuals_.back();
  }

 private:
  std::vector<double> residuals_;
};

[[noreturn]] void throw_invalid_input(const std::string& message);

/// Non-fatal diagnostics collected by operations that degrade gracefully.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

}  // namespace lagstokes
