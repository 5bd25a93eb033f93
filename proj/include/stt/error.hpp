#pragma once

#include <stdexcept>
#include <string>

namespace stt {

enum class Errc {
  Io = 1,
  Parse = 2,
  InvalidTask = 3,
  ResolutionTooCoarse = 4,
  NetTooLarge = 5,
  NoFeasibleAssignment = 6,
  Numerical = 7,
  UnknownPlant = 8,
  DimensionMismatch = 9,
  Argument = 10,
  FitFailed = 11,
  Domain = 12,
};

// Single exception type for the whole core; the C boundary maps `code`
// to a plain int and the message to the last-error buffer.
struct Error : std::runtime_error {
  Errc code;
  Error(Errc c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

}  // namespace stt
