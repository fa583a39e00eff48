#pragma once

#include <stdexcept>
#include <string>

namespace coarsening {

/// A caller-supplied value violated an operation's precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested computation exceeds the configured work budget.
class WorkloadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A contour integral that must be real came back with a large imaginary part.
class ResidueError : public std::runtime_error {
 public:
  ResidueError(const std::string& what, double re, double im)
      : std::runtime_error(what), real_part(re), imag_part(im) {}
  double real_part;
  double imag_part;
};

#define COARSENING_REQUIRE(cond, msg)                         \
  do {                                                        \
    if (!(cond)) throw ::coarsening::InputError(msg);         \
  } while (false)

}  // namespace coarsening
