#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phi4lab {

// Base of every error thrown by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : Error(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class ZeroFrequencyMode : public Error {
 public:
  using Error::Error;
};

class NonpositiveWeight : public Error {
 public:
  using Error::Error;
};

class NegativeSpatialCutoff : public Error {
 public:
  using Error::Error;
};

class InvalidCutoff : public Error {
 public:
  using Error::Error;
};

class BasisTooLarge : public Error {
 public:
  BasisTooLarge(std::size_t dimension, std::size_t limit)
      : Error("basis dimension " + std::to_string(dimension) + " exceeds limit " +
              std::to_string(limit)),
        dimension_(dimension) {}
  std::size_t dimension() const { return dimension_; }

 private:
  std::size_t dimension_;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, int iterations)
      : Error(what + " did not converge in " + std::to_string(iterations) + " iterations"),
        iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

class IndefiniteShift : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

class TruncationTooSmall : public Error {
 public:
  using Error::Error;
};

class EpsilonOutOfRange : public Error {
 public:
  using Error::Error;
};

class SpectralConditionViolated : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace phi4lab
