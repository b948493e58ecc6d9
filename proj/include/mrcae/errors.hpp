#pragma once

#include <stdexcept>
#include <string>

namespace mrcae {

/// Dimension/shape precondition violations (reported with both shapes).
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Invalid run/model configuration (bad sizes, levels, parameter ranges).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Illegal growth operation (deepen past N levels, widen before deepen).
struct GrowthError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Encoding does not match the model that is asked to decode it.
struct TopologyError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Training aborted (non-finite loss and similar runtime failures).
struct TrainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Base class for file format failures; subclasses keep the causes distinct.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : IoError {
  using IoError::IoError;
};

struct VersionError : IoError {
  using IoError::IoError;
};

struct TruncatedError : IoError {
  using IoError::IoError;
};

struct ChecksumError : IoError {
  using IoError::IoError;
};

}  // namespace mrcae
