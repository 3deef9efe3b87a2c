#pragma once

#include <stdexcept>
#include <string>

namespace cwm {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input (bad ballots, bad files, bad parameters).
class InputError : public Error {
 public:
  using Error::Error;
};

// Arithmetic would leave the checked 62-bit range.
class OverflowError : public InputError {
 public:
  using InputError::InputError;
};

// A complete solver or enumerator refused an instance above its configured caps.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace cwm
