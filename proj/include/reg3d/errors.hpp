#pragma once

#include <stdexcept>

namespace reg3d {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateInput : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct MissingDistances : Error { using Error::Error; };
struct MissingFrames : Error { using Error::Error; };
struct NoOverlap : Error { using Error::Error; };
struct InsufficientNeighbors : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct InvalidMr : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace reg3d
