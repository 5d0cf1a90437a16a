#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "recon/exec.hpp"
#include "recon/germ.hpp"
#include "recon/mollifier.hpp"
#include "recon/quasinorm.hpp"
#include "recon/reconstruct.hpp"

namespace recon::cli {

/// A rejected configuration value. field() is the config key at fault.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Raw settings as read from the config file and flags. Keys match the long flag names.
struct ExperimentConfig {
  int nmax = 12;
  double r = 1.5;
  std::string bump = "exponential";
  std::string germ = "taylor:sin:1";
  std::string kind = "besov";
  std::string p = "inf";
  std::string q = "inf";
  std::optional<double> gamma;
  std::optional<double> nu;
  int k_min = 2;
  std::optional<int> k_max;
  int l_min = 0;
  int l_max = 4;
  int truncation = 8;
  std::optional<int> n_stop;
  std::string mode = "positive";
  std::string fixture = "young";
  double eta = 1.5;
  std::string input;
  std::string out = "recon-out";
  std::uint64_t seed = 20240601;
  std::string exec = "parallel";
};

enum class Command { moments, coherence, norms, reconstruct, sewing, verify, report };

Command parse_command(std::string_view name);
std::string_view to_string(Command c) noexcept;

/// Germ selectors:
///   constant:FN          F_x = w for every x
///   taylor:FN:ORDER      Taylor jet of FN, ORDER in 0..3
///   incoherent[:SEED]    random signs per block (SEED defaults to the config seed)
///   young | sewing:NAME  D_2 A(x, .) for a sewing fixture
/// FN is sin or cos.
struct GermSelector {
  std::string family;
  std::string function;
  int order = 0;
  std::uint64_t seed = 0;
  std::string fixture;
};

GermSelector parse_germ_selector(std::string_view text, std::uint64_t default_seed);
GermPtr make_germ(const GermSelector& sel, const DyadicGrid& grid);

/// young, increment, linear or square.
TwoParamProcess make_fixture(std::string_view name);

/// Typed and range-checked settings for one command.
struct Resolved {
  Command command = Command::report;
  ExperimentConfig raw;
  BumpKind bump = BumpKind::exponential;
  QuasinormSpec spec;
  GermSelector germ;
  RegularityMode mode = RegularityMode::positive;
  Exec exec = Exec::parallel;
  int k_max = 0;
  int n_stop = 0;

  /// key=value pairs of every setting, in a fixed order.
  std::string describe() const;
};

/// Validates everything the command will need before any computation runs.
Resolved resolve(Command command, const ExperimentConfig& cfg);

/// Accepts a positive number, inf or infinity.
double parse_exponent(std::string_view field, std::string_view text);

}  // namespace recon::cli
