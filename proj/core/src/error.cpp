#include "vmdkit/error.hpp"

namespace vmdkit {

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::DataError: return "data-error";
    case ErrorKind::NumericFailure: return "numeric-failure";
    case ErrorKind::TrainingFailure: return "training-failure";
  }
  return "unknown";
}

}  // namespace vmdkit
