#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "recon/exec.hpp"
#include "recon/germ.hpp"
#include "recon/mollifier.hpp"

namespace recon {

using TwoParam = std::function<double(double, double)>;
using ThreeParam = std::function<double(double, double, double)>;

enum class SewRoute {
  reconstruction,
  /// x -> int_0^x D_2 A(u, u) du.
  diagonal_oracle,
};

std::string_view to_string(SewRoute route) noexcept;

/// A path sampled on [0, 1) with g(0) = 0 and g(x + 1) = g(x) + drift.
struct SewnPath {
  SampledFunction g;
  double drift = 0.0;
  SewRoute route = SewRoute::reconstruction;

  /// Value at a grid-aligned real x (any period).
  double value(double x) const;
};

/// delta g(s, t) = g(t) - g(s).
double delta1(const SewnPath& g, double s, double t);
/// delta A(s, u, t) = A(s, t) - A(s, u) - A(u, t).
double delta2(const TwoParam& A, double s, double u, double t);

/// delta A as a three-parameter process.
ThreeParam delta2_process(TwoParam A);
/// A on increasing pairs, extended by A(s, t) = -A(t, s).
TwoParam antisymmetrize(TwoParam A);

struct NormOptions {
  /// Offsets sampled per radius; <= 0 takes every grid offset.
  int offsets_per_radius = 16;
  /// Base points x are taken on the dyadic grid of this level (capped at n_max); <= 0 uses the full grid.
  int x_level = 8;
  Exec exec = Exec::parallel;
};

/// l^q_k 2^{eta k} sup_{|h| <= 2^-k} L^p_x |A(x, x + h)| over k in [k_min, k_max].
double b_norm(const TwoParam& A, const DyadicGrid& grid, double eta, double p, double q, int k_min, int k_max,
              const NormOptions& opts = {});

/// l^q_k 2^{eta k} sup_{|y'|, |y''| <= 2^{-k+1}} L^p_x |G(x, x + y', x + y'')|.
double bbar_norm(const ThreeParam& G, const DyadicGrid& grid, double eta, double p, double q, int k_min, int k_max,
                 const NormOptions& opts = {});

struct SewOptions {
  double eta = 1.5;
  double p = 2.0;
  double q = 2.0;
  double r = 2.5;
  /// Defaults to n_max - 4.
  std::optional<int> n_stop;
  Exec exec = Exec::parallel;
};

/// The path whose increments approximate A. Throws hypothesis_violated for
/// eta <= 1 or r <= 1, invalid_argument for p < 1.
SewnPath sew(const TwoParamProcess& A, const MollifierStack& stack, const SewOptions& opts = {},
             SewRoute route = SewRoute::reconstruction);

/// Cumulative end-corrected trapezoid x -> int_0^x f with the drift set to int_0^1 f.
SewnPath antiderivative(const SampledFunction& f, SewRoute route);

/// x_i -> sum over mesh cells of [0, x_i] of f(midpoint) (g(right) - g(left)), i = 0 .. 2^mesh_level.
std::vector<double> riemann_stieltjes(const SmoothFunction& f, const SmoothFunction& g, int mesh_level);

inline constexpr double C_sew = 64.0;

struct SewingBoundReport {
  double remainder_norm = 0.0;
  double delta_norm = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

/// b_norm(delta g - A) <= C_sew bbar_norm(delta A).
SewingBoundReport sewing_bound(const TwoParamProcess& A, const SewnPath& path, double eta, double p, double q,
                               int k_min, int k_max, const NormOptions& opts = {});

/// 1 on [0, 0.4], a C-infinity ramp down to 0 on (0.4, 0.6), 0 beyond; 0 for theta < 0.
double chi_tilde(double theta) noexcept;
/// chi_tilde(theta) - chi_tilde(2 theta).
double chi(double theta) noexcept;

struct ChiPartitionReport {
  int samples = 0;
  int levels = 0;
  double max_residual = 0.0;
  /// Largest |chi| found outside [0.2, 0.6].
  double support_leak = 0.0;
  double support_lo = 0.0;
  double support_hi = 0.0;
};

/// Checks sum_l chi(2^l theta) + chi(2^l (1 - theta)) = 1 at every interior grid
/// point and supp chi within [0.2, 0.6]. Throws partition_residual on failure.
ChiPartitionReport chi_partition_check(const DyadicGrid& grid);

}  // namespace recon
