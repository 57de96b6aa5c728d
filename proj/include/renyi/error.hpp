#pragma once

#include <stdexcept>
#include <utility>
#include <string>

namespace renyi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input data (non-finite values, size mismatch, zero mass).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Parameters outside the admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (NaN, stability bound, quadrature).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration failed validation; `path` names the field.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace renyi
