#include "lglab/error.hpp"

namespace lglab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Resolution:
      return "resolution";
    case ErrorKind::Domain:
      return "domain";
    case ErrorKind::Symmetry:
      return "symmetry";
    case ErrorKind::Precondition:
      return "precondition";
    case ErrorKind::Support:
      return "support";
    case ErrorKind::Correction:
      return "correction";
    case ErrorKind::FormulaValidation:
      return "formula-validation";
    case ErrorKind::Parse:
      return "parse";
  }
  return "unknown";
}

}  // namespace lglab
