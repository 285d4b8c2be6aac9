#pragma once

#include <stdexcept>
#include <string>

namespace qls {

// Invalid model/potential/grid parameters or malformed config input.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A solve failed to converge or collapsed to the trivial attractor.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine violated its own contract (e.g. Newton non-convergence
// on a monotone function). Should never fire for valid inputs.
struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

// File read/write/parse failures.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qls
