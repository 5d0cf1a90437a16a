#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "recon/grid.hpp"

namespace recon {

/// Values indexed by a scale k in [k_min, k_max] and a base point x.
///
/// Level k is sampled on its own dyadic grid of level min(n_max, max(4, k + oversample)),
/// i.e. at stride 2^{n_max - k - oversample} fine cells. The default oversample 3
/// puts 8 base points in every interval of length 2^-k.
class MultiscaleField {
 public:
  static constexpr int default_oversample = 3;

  MultiscaleField(DyadicGrid grid, int k_min, int k_max, int oversample = default_oversample,
                  std::string meta = {});

  const DyadicGrid& grid() const noexcept { return grid_; }
  int k_min() const noexcept { return k_min_; }
  int k_max() const noexcept { return k_max_; }
  int oversample() const noexcept { return oversample_; }
  const std::string& meta() const noexcept { return meta_; }
  void set_meta(std::string m) { meta_ = std::move(m); }
  bool divergent() const noexcept { return divergent_; }
  void set_divergent(bool d) noexcept { divergent_ = d; }

  bool has_level(int k) const noexcept { return k >= k_min_ && k <= k_max_; }
  const DyadicGrid& level_grid(int k) const { return levels_[slot(k)].grid; }
  std::size_t stride(int k) const { return std::size_t{1} << (grid_.n_max() - level_grid(k).n_max()); }
  std::size_t count(int k) const { return levels_[slot(k)].values.size(); }
  /// Base point of sample j at level k.
  double point(int k, std::size_t j) const { return level_grid(k).point(static_cast<std::ptrdiff_t>(j)); }
  /// Fine-grid index of sample j at level k.
  std::ptrdiff_t fine_index(int k, std::size_t j) const { return static_cast<std::ptrdiff_t>(j * stride(k)); }
  /// Measure carried by each sample at level k (the level spacing).
  double weight(int k) const { return level_grid(k).spacing(); }

  std::span<const double> slice(int k) const { return levels_[slot(k)].values; }
  std::span<double> mutable_slice(int k) { return levels_[slot(k)].values; }
  double at(int k, std::size_t j) const { return levels_[slot(k)].values[j]; }
  double& at(int k, std::size_t j) { return levels_[slot(k)].values[j]; }

  double sup() const noexcept;
  bool all_finite() const noexcept;
  MultiscaleField scaled(double factor) const;
  MultiscaleField operator+(const MultiscaleField& other) const;

 private:
  struct Level {
    DyadicGrid grid;
    std::vector<double> values;
  };

  std::size_t slot(int k) const {
    if (!has_level(k)) {
      std::ostringstream msg;
      msg << "scale " << k << " outside field range [" << k_min_ << ", " << k_max_ << "]";
      throw Error(ErrorKind::invalid_argument, msg.str());
    }
    return static_cast<std::size_t>(k - k_min_);
  }

  DyadicGrid grid_;
  int k_min_;
  int k_max_;
  int oversample_;
  std::string meta_;
  bool divergent_ = false;
  std::vector<Level> levels_;
};

/// Mean of fn over the closed ball of the given radius around fine index c,
/// sampling every s-th grid point with s = max(1, floor(radius / (h * per_radius))).
/// Cells straddling the boundary are weighted by their overlap, as in
/// ball_average. per_radius <= 0 samples every grid point.
template <class Fn>
double sampled_ball_mean(const DyadicGrid& g, std::ptrdiff_t c, double radius, int per_radius, Fn&& fn) {
  const double h = g.spacing();
  if (radius < 2.0 * h) {
    std::ostringstream msg;
    msg << "ball radius " << radius << " below two grid spacings (" << 2.0 * h << ")";
    throw Error(ErrorKind::radius_under_resolved, msg.str());
  }
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  std::ptrdiff_t s = 1;
  if (per_radius > 0) s = std::max<std::ptrdiff_t>(1, static_cast<std::ptrdiff_t>(std::floor(radius / h / per_radius)));
  const double cell = static_cast<double>(s) * h;
  CompensatedSum num;
  double den = 0.0;
  if (radius >= 0.5) {
    for (std::ptrdiff_t off = -n / 2 + 1; off <= n / 2; off += s) {
      num.add(fn(c + off));
      den += 1.0;
    }
    return num.value() / den;
  }
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(radius / cell)) + 1;
  for (std::ptrdiff_t j = -reach; j <= reach; ++j) {
    const double d = std::abs(static_cast<double>(j)) * cell;
    const double w = std::clamp((radius + 0.5 * cell - d) / cell, 0.0, 1.0);
    if (w == 0.0) continue;
    num.add(w * fn(c + j * s));
    den += w;
  }
  return num.value() / den;
}

}  // namespace recon
