#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adsplit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// A sub-integrator failed; `point()` is the grid index for pointwise solves
/// or `npos` for coupled ones.
class IntegrationError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit IntegrationError(const std::string& what, std::size_t point = npos)
      : Error(what), point_(point) {}

  std::size_t point() const noexcept { return point_; }

 private:
  std::size_t point_;
};

}  // namespace adsplit
