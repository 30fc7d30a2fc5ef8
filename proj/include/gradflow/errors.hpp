// errors.hpp — exception taxonomy shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace gradflow {

// Invalid user input or violated precondition (bad config, mismatched grids, ...).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A time step produced a non-finite field or auxiliary scalar. Carries the step index.
struct DivergenceError : std::runtime_error {
  long step_index;
  DivergenceError(long step, const std::string& what)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_index(step) {}
};

// Filesystem or serialization failure.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace gradflow
