#pragma once

#include <stdexcept>
#include <string>

namespace kahlerdyn {

/// Domain error raised by library operations (bad input, violated hypotheses).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or command line; maps to CLI exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace kahlerdyn
