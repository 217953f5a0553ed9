#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace camwatch {

// Base for every error the library raises. kind() is the stable,
// machine-readable name used in CLI error summaries.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define CAMWATCH_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  }

CAMWATCH_DEFINE_ERROR(InvalidInput);
CAMWATCH_DEFINE_ERROR(DimensionMismatch);
CAMWATCH_DEFINE_ERROR(InsufficientSamples);
CAMWATCH_DEFINE_ERROR(DecodeError);
CAMWATCH_DEFINE_ERROR(ArchiveError);
CAMWATCH_DEFINE_ERROR(IoError);
CAMWATCH_DEFINE_ERROR(SchemaError);
CAMWATCH_DEFINE_ERROR(InvalidBox);
CAMWATCH_DEFINE_ERROR(MissingTruth);
CAMWATCH_DEFINE_ERROR(NoInput);

#undef CAMWATCH_DEFINE_ERROR

// Raised when not a single seed page could be fetched.
class CrawlFailed : public Error {
 public:
  CrawlFailed(const std::string& message, std::vector<std::pair<std::string, std::string>> causes)
      : Error("CrawlFailed", message), causes_(std::move(causes)) {}

  // (seed url, cause) for every seed.
  const std::vector<std::pair<std::string, std::string>>& causes() const noexcept { return causes_; }

 private:
  std::vector<std::pair<std::string, std::string>> causes_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, std::vector<std::string> problems)
      : Error("ConfigError", message), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

}  // namespace camwatch
