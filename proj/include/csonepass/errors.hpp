#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace csonepass {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

class EmptySupportError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Thrown when a (near-)zero diagonal or non-invertible Gram matrix is hit.
/// index() is the offending diagonal position, or -1 when not attributable.
class SingularMatrixError : public Error {
 public:
  explicit SingularMatrixError(const std::string& what, Eigen::Index index = -1)
      : Error(what), index_(index) {}

  Eigen::Index index() const noexcept { return index_; }

 private:
  Eigen::Index index_;
};

}  // namespace csonepass
