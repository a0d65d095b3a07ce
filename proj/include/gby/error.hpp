#pragma once

#include <stdexcept>
#include <string>

namespace gby {

// Base class for all library errors. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied argument violates an operation's precondition
// (degree overflow, dimension mismatch, k out of range, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed, e.g. the Kronecker calibration
// ratio drifted across samples.
class ConventionError : public Error {
 public:
  using Error::Error;
};

// A generalized functional G fails the nondegeneracy condition D_G != 0.
class NondegeneracyViolated : public Error {
 public:
  using Error::Error;
};

namespace detail {
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}
}  // namespace detail

}  // namespace gby
