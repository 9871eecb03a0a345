#pragma once

#include <stdexcept>
#include <string>

namespace zebris {

/// Invalid scenario, plan, or mechanism parameters.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric input outside the domain of a model function (e.g. non-positive rate).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// The clearing DP would exceed its configured state budget.
class InstanceTooLarge : public std::runtime_error {
 public:
  explicit InstanceTooLarge(const std::string& what) : std::runtime_error(what) {}
};

/// File read/write failure, always carrying the offending path.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace zebris
