#pragma once

#include <stdexcept>

namespace senti {

// Malformed input or bad usage. The CLI maps this to exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A computation failed (divergence, degenerate system, scorer fault).
// The CLI maps this to exit code 1.
struct ComputeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace senti
