#pragma once

#include <stdexcept>
#include <string>

namespace hising {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dimension mismatch, out-of-range index, or malformed value in an argument.
struct InvalidInput : Error {
  using Error::Error;
};

// The empirical covariance (1/n)X^T X is numerically singular.
struct IllConditioned : Error {
  using Error::Error;
};

// Exact enumeration requested above the configuration cap.
struct TooLarge : Error {
  using Error::Error;
};

// The hypergraph has no edge of maximum cardinality m.
struct NoTopEdges : Error {
  using Error::Error;
};

// An iterate or gradient became non-finite; signals corrupted input.
struct NonFinite : Error {
  using Error::Error;
};

// Instance generation exhausted its retry budget.
struct GenerationFailed : Error {
  using Error::Error;
};

}  // namespace hising
