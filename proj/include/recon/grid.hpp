#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "recon/error.hpp"
#include "recon/exec.hpp"

namespace recon {

/// Uniform periodic sampling of the unit torus at spacing 2^-n_max.
///
/// Coordinates are always understood modulo 1. Only d = 1 kernels exist; the
/// dimension is carried so that scaling factors such as 2^{dk} read the same
/// as in the continuum formulas.
class DyadicGrid {
 public:
  static constexpr int min_level = 4;

  explicit DyadicGrid(int n_max, int dim = 1);

  int n_max() const noexcept { return n_max_; }
  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return std::size_t{1} << n_max_; }
  double spacing() const noexcept { return std::ldexp(1.0, -n_max_); }

  /// Index reduced into [0, size).
  std::size_t wrap(std::ptrdiff_t i) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(size());
    return static_cast<std::size_t>(((i % n) + n) % n);
  }
  /// Coordinate of grid index i in [0, 1).
  double point(std::ptrdiff_t i) const noexcept {
    return static_cast<double>(wrap(i)) * spacing();
  }
  /// Signed offset of index i from 0, in (-size/2, size/2].
  std::ptrdiff_t lifted_index(std::size_t i) const noexcept;
  /// Nearest grid index to a torus point.
  std::size_t nearest_index(double x) const noexcept;
  /// True when x sits on a grid point (up to 1e-9 of a cell).
  bool on_grid(double x) const noexcept;

  friend bool operator==(const DyadicGrid&, const DyadicGrid&) = default;

 private:
  int n_max_;
  int dim_;
};

/// Representative of d modulo 1 in (-1/2, 1/2].
double lift(double d) noexcept;
/// Distance on the unit torus.
double torus_distance(double a, double b) noexcept;

/// Real samples on a DyadicGrid. Values at index i represent the function at
/// the torus point i*h; centred functions use the lift of i*h in (-1/2, 1/2].
class SampledFunction {
 public:
  SampledFunction(DyadicGrid grid, std::vector<double> values,
                  std::optional<double> support_radius = std::nullopt);

  /// Samples a centred function y -> fn(y), y in (-1/2, 1/2].
  static SampledFunction from_centered(const DyadicGrid& grid,
                                       const std::function<double(double)>& fn,
                                       std::optional<double> support_radius = std::nullopt);
  /// Samples a periodic function x -> fn(x), x in [0, 1).
  static SampledFunction from_periodic(const DyadicGrid& grid,
                                       const std::function<double(double)>& fn);
  static SampledFunction zeros(const DyadicGrid& grid);

  const DyadicGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& mutable_values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::optional<double>& support_radius() const noexcept { return support_radius_; }

  double sup_norm() const noexcept;

  SampledFunction operator-(const SampledFunction& other) const;
  SampledFunction operator+(const SampledFunction& other) const;
  SampledFunction scaled(double factor) const;

 private:
  DyadicGrid grid_;
  std::vector<double> values_;
  std::optional<double> support_radius_;
};

/// A compactly supported profile stored only on its offsets [lo, hi].
///
/// This is the form in which tests and mollifiers are handed to germs: the
/// translate centred at grid index c takes the value taps[j - lo] at c + j.
class Kernel {
 public:
  Kernel(DyadicGrid grid, std::ptrdiff_t lo, std::vector<double> taps);

  /// Restricts a centred sampled function to its recorded support (or to a
  /// full period when no support radius is known).
  static Kernel from_sampled(const SampledFunction& f);

  const DyadicGrid& grid() const noexcept { return grid_; }
  std::ptrdiff_t lo() const noexcept { return lo_; }
  std::ptrdiff_t hi() const noexcept { return lo_ + static_cast<std::ptrdiff_t>(taps_.size()) - 1; }
  std::span<const double> taps() const noexcept { return taps_; }
  double at(std::ptrdiff_t offset) const noexcept {
    return offset < lo_ || offset > hi() ? 0.0 : taps_[static_cast<std::size_t>(offset - lo_)];
  }
  /// h * sum of taps, cached at construction.
  double mass() const noexcept { return mass_; }
  /// Support radius in torus units.
  double radius() const noexcept;

  Kernel scaled(double factor) const;
  SampledFunction to_sampled() const;

 private:
  DyadicGrid grid_;
  std::ptrdiff_t lo_;
  std::vector<double> taps_;
  double mass_;
};

/// A finite stand-in for the Hoelder test class: members are centred,
/// supported in B(0, 1/2) and normalised to unit discrete Hoelder-r seminorm.
struct TestClassDictionary {
  double r = 1.0;
  std::vector<SampledFunction> members;
};

/// Smallest number of samples across the support a dilated function must keep.
inline constexpr int min_samples_across = 4;

/// y -> 2^{dk} xi(2^k (y - x)). Exact subsampling for grid-aligned x, cubic
/// interpolation otherwise.
SampledFunction dilate_translate(const SampledFunction& xi, int k, double x);

/// Same dilation at x = 0 returned in compact form.
Kernel dilate_kernel(const SampledFunction& xi, int k);

/// Uniform-weight periodic trapezoid h * sum(values).
double quadrature(const SampledFunction& f);
double quadrature(std::span<const double> values, double h);

/// Periodic convolution (f * g)(x) = h sum_y f(y) g(x - y).
SampledFunction convolve(const SampledFunction& f, const SampledFunction& g);

/// Mean over the closed torus ball B(x, radius); each grid point is weighted
/// by the fraction of its cell lying inside the ball.
double ball_average(const SampledFunction& f, double x, double radius);
double ball_average(std::span<const double> values, const DyadicGrid& grid, double x,
                    double radius);

/// Discrete Hoelder-r seminorm: sup over pairs of sample points in the
/// support of |D^{r~} xi(a) - D^{r~} xi(b)| / |a - b|^{r - r~}, with D^{r~} a
/// centred finite difference of order r~ = ceil(r) - 1.
double holder_seminorm(const SampledFunction& xi, double r, Exec exec = Exec::parallel);

/// Compensated accumulator (Neumaier).
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {
/// Circular convolution of two equal-length arrays, scaled by h.
std::vector<double> circular_convolve(std::span<const double> a, std::span<const double> b,
                                      double h);
/// Centred finite difference of given order applied to the samples.
std::vector<double> centered_difference(std::span<const double> values, double h, int order);
}  // namespace detail

}  // namespace recon
