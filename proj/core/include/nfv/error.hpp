#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nfv {

/// Invalid user input: non-finite profile samples, shape mismatches, malformed files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration that violates a solver contract (CFL, flux/model pairing, kernel support).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flux model produced a non-finite value.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time step produced NaN/Inf. Carries the offending cell.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, std::size_t species, std::size_t i, std::size_t j)
      : std::runtime_error(what), species_(species), i_(i), j_(j) {}

  std::size_t species() const { return species_; }
  std::size_t i() const { return i_; }
  std::size_t j() const { return j_; }

 private:
  std::size_t species_;
  std::size_t i_;
  std::size_t j_;
};

}  // namespace nfv
