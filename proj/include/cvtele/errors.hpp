#pragma once

#include <stdexcept>
#include <string>

namespace cvtele {

// Base for every error raised by the library. Callers that only care about
// "the model could not be evaluated here" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Numerical failures (solver breakdown, unreachable tolerance, unstable system).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class BranchPointError : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnconfinedModeError : public DomainError {
 public:
  using DomainError::DomainError;
};

class SingularModulationError : public DomainError {
 public:
  using DomainError::DomainError;
};

class NonPhysicalCMError : public DomainError {
 public:
  using DomainError::DomainError;
};

class NonPositiveGammaError : public DomainError {
 public:
  using DomainError::DomainError;
};

class EigenSolveError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UnstableSystemError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SolveError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepSizeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : ConfigError(what), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public ConfigError {
 public:
  ValidationError(std::string field, const std::string& what)
      : ConfigError(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cvtele
