#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "recon/multiscale.hpp"

namespace recon {

enum class QuasinormKind {
  /// l^q_k 2^{gamma k} L^p_x H(k, x), p >= 1.
  besov_high_p,
  /// l^q_k 2^{nu k} L^p_x avg_{B(x, 2^-k)} H(k, .), 0 < p < 1.
  besov_low_p,
  /// L^p_x l^q_k 2^{gamma k} (avg_{|y| <= 2^-k} H(k, x + y)^q)^{1/q}.
  triebel_lizorkin,
};

std::string_view to_string(QuasinormKind kind) noexcept;
QuasinormKind parse_quasinorm_kind(std::string_view name);

/// p and q may be +infinity. gamma_or_nu is nu for besov_low_p, gamma otherwise.
struct QuasinormSpec {
  QuasinormKind kind = QuasinormKind::besov_high_p;
  double p = 2.0;
  double q = 2.0;
  double gamma_or_nu = 0.5;
  int dim = 1;

  /// Throws invalid_spec when the exponents fall outside the admissible range.
  void validate() const;
  /// Scaling exponent: gamma, or nu - d (1/p - 1) for besov_low_p.
  double effective_gamma() const;
  std::string describe() const;
};

/// Discrete realisation on the torus: L^p with the level spacing as weight,
/// l^q over the field's scale range, sup when an exponent is infinite.
double apply(const QuasinormSpec& spec, const MultiscaleField& H);

struct ScalingCheckResult {
  int l = 0;
  double ratio = 0.0;
  double gamma_effective = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Acceptance constant for the scaling inequality.
inline constexpr double C_scaling = 32.0;

/// ratio = N[(k, x) -> avg_{|z-x|<=2^-k} H(k+l, z)] / (2^{-l gamma'} N[H]).
/// The left field lives on [k_min, k_max - l]. gamma_override replaces gamma'
/// (used to exhibit a wrong exponent).
ScalingCheckResult scaling_check(const QuasinormSpec& spec, const MultiscaleField& H, int l,
                                 std::optional<double> gamma_override = std::nullopt);

}  // namespace recon
