#pragma once

#include <stdexcept>
#include <string>

namespace satl {

/// Error categories. The numeric value doubles as the CLI exit code.
enum class ErrorKind : int {
  Config = 1,
  Numerical = 2,
  Truncation = 3,
  Fit = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Short machine-readable identifier, e.g. "degenerate-steady-state".
  const std::string& code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
  std::string code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message, std::string code = "config")
      : Error(ErrorKind::Config, std::move(code), message) {}
};

class IndexError : public ConfigError {
 public:
  explicit IndexError(const std::string& message) : ConfigError(message, "index") {}
};

class DomainError : public ConfigError {
 public:
  explicit DomainError(const std::string& message) : ConfigError(message, "domain") {}
};

class PreconditionError : public ConfigError {
 public:
  explicit PreconditionError(const std::string& message)
      : ConfigError(message, "precondition") {}
};

class UnsupportedSchemeError : public ConfigError {
 public:
  explicit UnsupportedSchemeError(const std::string& message)
      : ConfigError(message, "unsupported-scheme") {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& message, std::string code = "numerical",
                          double residual = 0.0)
      : Error(ErrorKind::Numerical, std::move(code), message), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class DegenerateSteadyStateError : public NumericalError {
 public:
  DegenerateSteadyStateError(const std::string& message, int kernel_dimension)
      : NumericalError(message, "degenerate-steady-state"),
        kernel_dimension_(kernel_dimension) {}

  int kernel_dimension() const noexcept { return kernel_dimension_; }

 private:
  int kernel_dimension_;
};

class ZeroSignalError : public NumericalError {
 public:
  explicit ZeroSignalError(const std::string& message)
      : NumericalError(message, "zero-signal") {}
};

class TruncationError : public Error {
 public:
  TruncationError(const std::string& message, int last_n_max)
      : Error(ErrorKind::Truncation, "truncation-failure", message), last_n_max_(last_n_max) {}

  int last_n_max() const noexcept { return last_n_max_; }

 private:
  int last_n_max_;
};

class FitError : public Error {
 public:
  explicit FitError(const std::string& message, std::string code = "fit")
      : Error(ErrorKind::Fit, std::move(code), message) {}
};

class DoubletDetectedError : public FitError {
 public:
  DoubletDetectedError(const std::string& message, int n_peaks)
      : FitError(message, "doublet-detected"), n_peaks_(n_peaks) {}

  int n_peaks() const noexcept { return n_peaks_; }

 private:
  int n_peaks_;
};

}  // namespace satl
