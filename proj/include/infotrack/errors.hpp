#pragma once

#include <stdexcept>
#include <string>

namespace infotrack {

struct DegenerateRange : std::runtime_error {
  explicit DegenerateRange(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularInnovation : std::runtime_error {
  explicit SingularInnovation(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotPositiveDefinite : std::runtime_error {
  explicit NotPositiveDefinite(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonFiniteLoss : std::runtime_error {
  explicit NonFiniteLoss(const std::string& msg) : std::runtime_error(msg) {}
};

struct EpisodeFinished : std::runtime_error {
  explicit EpisodeFinished(const std::string& msg) : std::runtime_error(msg) {}
};

struct InitFailure : std::runtime_error {
  explicit InitFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct ChecksumMismatch : std::runtime_error {
  explicit ChecksumMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct SchemaVersionMismatch : std::runtime_error {
  explicit SchemaVersionMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace infotrack
