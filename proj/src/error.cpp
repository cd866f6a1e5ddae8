#include "beamspace/error.hpp"

namespace beamspace {

const char* category_name(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::config:
      return "config";
    case ErrorCategory::ingestion:
      return "ingestion";
    case ErrorCategory::numerical:
      return "numerical";
    case ErrorCategory::internal:
      return "internal";
  }
  return "internal";
}

}  // namespace beamspace
