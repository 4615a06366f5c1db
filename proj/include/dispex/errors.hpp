#pragma once

#include <stdexcept>
#include <string>

namespace dispex {

// Bad configuration, unreadable or malformed input files. Maps to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DagError : public InputError {
 public:
  using InputError::InputError;
};

// Treatment or control arm too small to estimate an effect on the scope.
class InsufficientOverlap : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Treatment indicator is collinear with the confounder dummies.
class SingularDesign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Brute-force selection refused because the search space is too large.
class CombinatorialGuard : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dispex
