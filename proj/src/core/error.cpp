#include "meso/core/error.hpp"

namespace meso {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::incompatible: return "incompatible inputs";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::validation: return "validation failure";
    case ErrorCode::singular: return "singular system";
    case ErrorCode::diverged: return "iteration diverged";
    case ErrorCode::not_converged: return "iteration limit reached";
  }
  return "unknown";
}

}  // namespace meso
