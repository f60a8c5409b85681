#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace offload {

/// Raised for arguments outside an operation's domain (bad quality floor,
/// negative demand, demand above capacity, wrong provider kind, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Constraint {
  SharedCapacity,
  LicensedCapacity,
  BackhaulWifiOnly,
  BackhaulCombined,
  ProfileBounds,
};

const char* to_string(Constraint c);

/// A placement violates one of the capacity constraints of the market.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(Constraint constraint, const std::string& what)
      : std::runtime_error(what), constraint_(constraint) {}

  Constraint constraint() const noexcept { return constraint_; }

 private:
  Constraint constraint_;
};

struct ConfigIssue {
  std::string path;
  std::string message;

  bool operator==(const ConfigIssue&) const = default;
};

/// Scenario parse or validation failure. Carries every issue found, not just
/// the first one.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);

  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

}  // namespace offload
