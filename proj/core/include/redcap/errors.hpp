#pragma once

#include <stdexcept>
#include <string>

namespace redcap {

/// Caller passed values outside the operation's input domain
/// (out-of-bounds box, mismatched mask dimensions, empty candidate pool, ...).
class InputDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A transformation parameter breaks one of the MR guidelines
/// (crop area, stretch retained proportion, rotation angle bounds).
class GuidelineError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bad run configuration: unreadable files, inconsistent thresholds, unknown keys.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Transport or protocol failure talking to an external model endpoint.
/// Carries the raw payload (when one was received) for postmortems.
class AdapterError : public std::runtime_error {
 public:
  explicit AdapterError(const std::string& message, std::string payload = {})
      : std::runtime_error(message), payload_(std::move(payload)) {}

  const std::string& payload() const noexcept { return payload_; }

 private:
  std::string payload_;
};

}  // namespace redcap
