#pragma once

#include <stdexcept>
#include <string>

namespace lglab {

enum class ErrorKind {
  Resolution,
  Domain,
  Symmetry,
  Precondition,
  Support,
  Correction,
  FormulaValidation,
  Parse,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; the kind tells callers (and the
/// CLI exit-code mapping) what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lglab
