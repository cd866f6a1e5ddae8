#pragma once

#include <stdexcept>
#include <string>

namespace beamspace {

/// Failure families; the numeric values double as CLI exit codes.
enum class ErrorCategory : int {
  config = 1,
  ingestion = 2,
  numerical = 3,
  internal = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class IngestionError : public Error {
 public:
  explicit IngestionError(const std::string& what) : Error(ErrorCategory::ingestion, what) {}
};

/// Raised for singular load blocks, non-PSD correlation matrices and similar.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

const char* category_name(ErrorCategory category) noexcept;

}  // namespace beamspace
