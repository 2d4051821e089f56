#pragma once

#include <stdexcept>
#include <string>

namespace tsunet {

// Error taxonomy mirrored by the CLI exit codes: usage errors map to 1,
// DataError to 2, NumericError to 3.

// Dimension/precondition violations on tensors and layer inputs.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Unreadable or malformed files, mismatched datasets.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Diverging optimization, unstable solver settings, non-finite values.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tsunet
