#pragma once

#include <stdexcept>

namespace lpm {

// Malformed or inconsistent input: files, tick streams, result artifacts.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical routine could not meet its contract: non-convergence, overflow,
// degenerate state, empty candidate set.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lpm
