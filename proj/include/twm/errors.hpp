#pragma once

#include <stdexcept>
#include <string>

namespace twm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (bad parameters, grid too small,
/// stability constraint violated, unknown names).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operation requested outside the parameter regime it is defined for.
class RegimeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Combination the library deliberately does not handle.
class UnsupportedError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A basis function cannot be represented on the requested grid.
class ResolutionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Non-finite values or a failed numerical procedure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Test-signal basis too small to capture the propagated energy.
class TruncationError : public NumericalError {
 public:
  TruncationError(const std::string& what, int worst_column, double leakage)
      : NumericalError(what), worst_column_(worst_column), leakage_(leakage) {}
  int worst_column() const { return worst_column_; }
  double leakage() const { return leakage_; }

 private:
  int worst_column_;
  double leakage_;
};

/// Malformed input data (files, matrices with non-finite entries).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace twm
