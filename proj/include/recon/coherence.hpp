#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "recon/exec.hpp"
#include "recon/germ.hpp"
#include "recon/mollifier.hpp"
#include "recon/multiscale.hpp"

namespace recon {

enum class RegularityMode {
  positive,
  /// f = lim (f_n - sum_{m=1}^{n-1} g''_m).
  negative,
};

std::string_view to_string(RegularityMode mode) noexcept;
RegularityMode parse_regularity_mode(std::string_view name);

struct CoherenceOptions {
  /// Sample points per ball radius in every inner average; <= 0 is dense.
  int samples_per_radius = 8;
  int oversample = MultiscaleField::default_oversample;
  Exec exec = Exec::parallel;
  /// negative: the second sum runs over l = -k..0 instead of l = 0..L-1.
  RegularityMode mode = RegularityMode::positive;
};

struct CoherenceReport {
  /// H(k, x) truncated after L terms of each sum.
  MultiscaleField field;
  int truncation_L = 0;
  /// Geometric extrapolation of the omitted terms; +inf when the last ratio is >= 1.
  MultiscaleField tail;
  bool divergence_flag = false;
  /// Per-l summands of the first sum (already weighted by 2^{-lr}) and of the second sum.
  /// In negative mode second_terms[m] holds l = -m, zero where m > k.
  std::vector<MultiscaleField> first_terms;
  std::vector<MultiscaleField> second_terms;
};

/// Ratio above which consecutive terms count as non-decaying.
inline constexpr double divergence_ratio = 0.95;
/// Number of trailing terms inspected by the divergence test.
inline constexpr int divergence_window = 4;

/// H(k, x) = sum_l 2^{-lr} avg_{|y-x|<=2^-k} |(F_y - F_x)(phi_y^{(k+l)})|
///         + sum_l avg_{|z-x|<=2^-k} avg_{|y-z|<=2^{-k-l}} |(F_z - F_y)(phi_y^{(k+l)})|,
/// both sums cut at l < L. Requires k_max + L <= n_max - 2.
/// In negative mode the second sum is taken over l = -k..0 (exact, no cut) and
/// the tail and divergence test look at the first sum only.
CoherenceReport h_field(const Germ& germ, const MollifierStack& stack, double r, int k_min, int k_max, int L,
                        const CoherenceOptions& opts = {});

/// (k, x) -> avg_{|h|<=2^-k} |(F_{x+h} - F_x)(phi_{x+h}^{(k+l)})|. Requires k_max + l <= n_max - 2.
MultiscaleField coherence_coefficients(const Germ& germ, const MollifierStack& stack, int k_min, int k_max,
                                       int l, const CoherenceOptions& opts = {});

struct AlphaFit {
  double alpha = 0.0;
  double A = 0.0;
};

/// Least-squares slope of log2(value) against l, clamped at alpha >= 0, with
/// A the smallest constant such that value_l <= 2^{l alpha} A for every sample.
/// All-zero data gives (0, 0).
AlphaFit fit_alpha_A(std::span<const std::pair<int, double>> samples);

/// Least-squares slope of log2(y) against x. Shared by the convergence fits.
double log2_slope(std::span<const double> x, std::span<const double> y);

}  // namespace recon
