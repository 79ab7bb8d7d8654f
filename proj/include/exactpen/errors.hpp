#pragma once

#include <stdexcept>
#include <string>

namespace exactpen {

// Bad input: malformed instance, out-of-range parameter, unsupported
// configuration for the requested operation.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition of a diagnostic does not hold for the given point.
class PreconditionViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Backtracking exceeded its per-iteration cap.
class LineSearchStall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonFiniteObjective : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Instance generation could not produce a full-rank sensing matrix.
class RankDeficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace exactpen
