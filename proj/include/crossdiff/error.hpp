#pragma once

#include <stdexcept>
#include <string>

namespace crossdiff {

// Every error carries a short machine-readable code ("regime_not_weak",
// "partition_no_convergence", ...) alongside the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Precondition / configuration violations. The CLI maps these to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside the admissible range of a rate family.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Solver failures, blow-up, positivity loss. The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace crossdiff
