#pragma once

#include <stdexcept>
#include <string>

namespace scvi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input outside the domain of an operation (infeasible point, bad parameter).
class DomainError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Configuration rejected before running; `violation` is a stable identifier.
class ConfigError : public Error {
 public:
  ConfigError(std::string violation, const std::string& message)
      : Error(violation + ": " + message), violation_(std::move(violation)) {}
  const std::string& violation() const noexcept { return violation_; }

 private:
  std::string violation_;
};

}  // namespace scvi
