#include "finslerq/errors.hpp"

namespace finslerq {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedInput: return "malformed-input";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::InvalidStructure: return "invalid-structure";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::ApproximationFailed: return "approximation-failed";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::ChartMismatch: return "chart-mismatch";
    case ErrorKind::Internal: return "internal";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

}  // namespace finslerq
