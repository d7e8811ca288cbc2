#pragma once

#include <stdexcept>
#include <string>

namespace kanbench {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  ParseError(const std::string& msg, int line_number)
      : Error("line " + std::to_string(line_number) + ": " + msg),
        line(line_number) {}
  explicit ParseError(const std::string& msg) : Error(msg) {}
  int line = 0;
};

struct DegenerateDataset : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ShapeError : Error {
  using Error::Error;
};
struct CacheError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
struct EmptyBatch : Error {
  using Error::Error;
};
struct ResampleError : Error {
  using Error::Error;
};
struct UndefinedMetric : Error {
  using Error::Error;
};
struct DegenerateTest : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

// Raised when a training loss stops being finite; carries the epoch index.
struct NumericDivergence : Error {
  NumericDivergence(const std::string& msg, int epoch_index)
      : Error(msg + " (epoch " + std::to_string(epoch_index) + ")"),
        epoch(epoch_index) {}
  int epoch = 0;
};

}  // namespace kanbench
