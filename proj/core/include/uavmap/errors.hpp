#pragma once

#include <stdexcept>
#include <string>

namespace uavmap {

// Error taxonomy mirrored by the CLI exit codes:
//   ConfigError -> 2, DataError -> 3, NumericError -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration (bad voxel size, unknown config key, ...).
struct ConfigError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data (frame-tag mismatch, empty cloud,
// out-of-order timestamps, unreadable files, ...).
struct DataError : Error {
  using Error::Error;
};

// Numerical failure at runtime (cheirality violation, singular matrix,
// diverging optimization, ...).
struct NumericError : Error {
  using Error::Error;
};

}  // namespace uavmap
