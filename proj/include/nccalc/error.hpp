#pragma once

#include <stdexcept>
#include <string>

namespace nccalc {

/// Malformed input text (expressions, files, unknown names).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class DivisionByZero : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A structure failed its own consistency checks (confluence, morphism
/// verification, preset self-check).
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nccalc
