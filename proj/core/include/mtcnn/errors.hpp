#pragma once

#include <stdexcept>
#include <string>

namespace mtcnn {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tensor shape / dimension mismatches.
struct ShapeError : Error {
  using Error::Error;
};

/// Invalid configuration values (bad rates, odd PE dim, unknown keys, ...).
struct ConfigError : Error {
  using Error::Error;
};

/// Invalid data at runtime (labels out of range, single-class metric input, ...).
struct DataError : Error {
  using Error::Error;
};

/// Malformed files: JSONL lines, vocabulary files, checkpoint containers.
struct FormatError : Error {
  using Error::Error;
};

/// Checkpoint/config/vocabulary incompatibility.
struct CompatError : Error {
  using Error::Error;
};

/// Non-finite values where finite ones are required.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace mtcnn
