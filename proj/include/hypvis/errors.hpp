#pragma once

#include <stdexcept>
#include <string>

namespace hypvis {

// Bad user input / configuration (CLI exit code 1).
struct validation_error : std::runtime_error {
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical machinery gave up: bracketing, quadrature depth, resource guards
// (CLI exit code 2).
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hypvis
