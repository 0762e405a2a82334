#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hamlearn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different numbers of sites.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds a configured resource limit (e.g. the dense-matrix limit).
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// An expectation table lacks a string that an assembly step needs.
class IncompleteDataError : public Error {
 public:
  explicit IncompleteDataError(std::string missing)
      : Error("expectation table has no entry for '" + missing + "'"),
        missing_(std::move(missing)) {}
  const std::string& missing() const noexcept { return missing_; }

 private:
  std::string missing_;
};

/// Malformed text input (tables, configs, fixtures).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Error that carries the offending eigenvalues of some matrix.
class SpectralError : public Error {
 public:
  SpectralError(const std::string& what, std::vector<double> eigenvalues)
      : Error(what), eigenvalues_(std::move(eigenvalues)) {}
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }

 private:
  std::vector<double> eigenvalues_;
};

/// The Gram form of the perturbing operators is not positive definite.
class GramDegenerate : public SpectralError {
 public:
  using SpectralError::SpectralError;
};

/// The compressed modular operator has non-positive eigenvalues.
class DeltaNotPositive : public SpectralError {
 public:
  using SpectralError::SpectralError;
};

/// Every kernel direction has zero expectation, so the gauge cannot be fixed.
class NormalizationDegenerate : public Error {
 public:
  using Error::Error;
};

}  // namespace hamlearn
