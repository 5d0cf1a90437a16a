#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace recon {

enum class ErrorKind {
  invalid_argument,
  scale_too_fine,
  grid_mismatch,
  radius_under_resolved,
  singular_system,
  moment_residual,
  route_disagreement,
  scale_budget_exceeded,
  nonpositive_value,
  hypothesis_violated,
  invalid_spec,
  empty_dictionary,
  partition_residual,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to a module and an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace recon
