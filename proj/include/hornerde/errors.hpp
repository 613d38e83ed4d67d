#pragma once

#include <stdexcept>
#include <string>

namespace hornerde {

// Invalid or unsupported configuration (bad kind, degree too small, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition (order mismatch, length mismatch).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnsupportedProblem : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Collocation system with too few rows for its unknowns, or none at all.
class SystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, long epoch)
      : std::runtime_error(what), epoch_(epoch) {}
  long epoch() const noexcept { return epoch_; }

 private:
  long epoch_;
};

}  // namespace hornerde
