#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>

#include "config.hpp"
#include "recon/error.hpp"
#include "recon/multiscale.hpp"

namespace recon::cli {

inline constexpr int exit_pass = 0;
inline constexpr int exit_assertion = 1;
inline constexpr int exit_config = 2;

/// A library error tagged with the module and operation that raised it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string module, std::string op, const Error& cause)
      : std::runtime_error(module + "::" + op + ": " + std::string(to_string(cause.kind())) + ": " + cause.what()),
        kind_(cause.kind()) {}
  ErrorKind kind() const noexcept { return kind_; }
  /// Precondition failures count as configuration errors, the rest as failed checks.
  int exit_status() const noexcept;

 private:
  ErrorKind kind_;
};

/// Runs one experiment, writing CSV files under cfg.raw.out and a short
/// summary to `log`. Returns exit_pass or exit_assertion.
int run(const Resolved& cfg, std::ostream& log);

/// Reads a k,x,value table (extra columns ignored) back into a field on `grid`.
MultiscaleField read_field_csv(const std::filesystem::path& path, const DyadicGrid& grid);

}  // namespace recon::cli
