#include "recon/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <limits>
#include <mutex>
#include <sstream>

namespace recon {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::scale_too_fine: return "scale-too-fine";
    case ErrorKind::grid_mismatch: return "grid-mismatch";
    case ErrorKind::radius_under_resolved: return "radius-under-resolved";
    case ErrorKind::singular_system: return "singular-system";
    case ErrorKind::moment_residual: return "moment-residual";
    case ErrorKind::route_disagreement: return "route-disagreement";
    case ErrorKind::scale_budget_exceeded: return "scale-budget-exceeded";
    case ErrorKind::nonpositive_value: return "nonpositive-value";
    case ErrorKind::hypothesis_violated: return "hypothesis-violated";
    case ErrorKind::invalid_spec: return "invalid-spec";
    case ErrorKind::empty_dictionary: return "empty-dictionary";
    case ErrorKind::partition_residual: return "partition-residual";
  }
  return "unknown";
}

DyadicGrid::DyadicGrid(int n_max, int dim) : n_max_(n_max), dim_(dim) {
  if (n_max < min_level || n_max > 26) {
    std::ostringstream msg;
    msg << "grid level n_max=" << n_max << " outside [" << min_level << ", 26]";
    throw Error(ErrorKind::invalid_argument, msg.str());
  }
  if (dim != 1) {
    throw Error(ErrorKind::invalid_argument, "only d = 1 grids have kernels");
  }
}

std::ptrdiff_t DyadicGrid::lifted_index(std::size_t i) const noexcept {
  const auto n = static_cast<std::ptrdiff_t>(size());
  const auto j = static_cast<std::ptrdiff_t>(i % size());
  return j > n / 2 ? j - n : j;
}

std::size_t DyadicGrid::nearest_index(double x) const noexcept {
  const double t = x - std::floor(x);
  return wrap(static_cast<std::ptrdiff_t>(std::llround(t * static_cast<double>(size()))));
}

bool DyadicGrid::on_grid(double x) const noexcept {
  const double t = x * static_cast<double>(size());
  return std::abs(t - std::round(t)) < 1e-9;
}

double lift(double d) noexcept {
  double r = d - std::floor(d);  // [0, 1)
  if (r > 0.5) r -= 1.0;
  return r;
}

double torus_distance(double a, double b) noexcept { return std::abs(lift(a - b)); }

// ---------------------------------------------------------------------------

SampledFunction::SampledFunction(DyadicGrid grid, std::vector<double> values,
                                 std::optional<double> support_radius)
    : grid_(grid), values_(std::move(values)), support_radius_(support_radius) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorKind::grid_mismatch, "sample count does not match grid size");
  }
}

SampledFunction SampledFunction::from_centered(const DyadicGrid& grid,
                                               const std::function<double(double)>& fn,
                                               std::optional<double> support_radius) {
  std::vector<double> v(grid.size());
  const double h = grid.spacing();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double y = static_cast<double>(grid.lifted_index(i)) * h;
    v[i] = (support_radius && std::abs(y) > *support_radius) ? 0.0 : fn(y);
  }
  return {grid, std::move(v), support_radius};
}

SampledFunction SampledFunction::from_periodic(const DyadicGrid& grid,
                                               const std::function<double(double)>& fn) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.point(static_cast<std::ptrdiff_t>(i)));
  return {grid, std::move(v)};
}

SampledFunction SampledFunction::zeros(const DyadicGrid& grid) {
  return {grid, std::vector<double>(grid.size(), 0.0)};
}

double SampledFunction::sup_norm() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

namespace {
std::optional<double> merged_support(const std::optional<double>& a, const std::optional<double>& b) {
  if (a && b) return std::max(*a, *b);
  return std::nullopt;
}
}  // namespace

SampledFunction SampledFunction::operator-(const SampledFunction& other) const {
  if (!(grid_ == other.grid_)) throw Error(ErrorKind::grid_mismatch, "difference of functions on different grids");
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] - other.values_[i];
  return {grid_, std::move(v), merged_support(support_radius_, other.support_radius_)};
}

SampledFunction SampledFunction::operator+(const SampledFunction& other) const {
  if (!(grid_ == other.grid_)) throw Error(ErrorKind::grid_mismatch, "sum of functions on different grids");
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + other.values_[i];
  return {grid_, std::move(v), merged_support(support_radius_, other.support_radius_)};
}

SampledFunction SampledFunction::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return {grid_, std::move(v), support_radius_};
}

// ---------------------------------------------------------------------------

Kernel::Kernel(DyadicGrid grid, std::ptrdiff_t lo, std::vector<double> taps)
    : grid_(grid), lo_(lo), taps_(std::move(taps)), mass_(0.0) {
  if (taps_.empty() || taps_.size() > grid_.size()) {
    throw Error(ErrorKind::invalid_argument, "kernel must have between 1 and N taps");
  }
  mass_ = quadrature(taps_, grid_.spacing());
}

Kernel Kernel::from_sampled(const SampledFunction& f) {
  const DyadicGrid& g = f.grid();
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  std::ptrdiff_t lo = -n / 2 + 1;
  std::ptrdiff_t hi = n / 2;
  if (f.support_radius() && *f.support_radius() < 0.5) {
    const auto r = static_cast<std::ptrdiff_t>(std::floor(*f.support_radius() / g.spacing() + 1e-9));
    lo = -r;
    hi = r;
  }
  std::vector<double> taps(static_cast<std::size_t>(hi - lo + 1));
  for (std::ptrdiff_t j = lo; j <= hi; ++j) taps[static_cast<std::size_t>(j - lo)] = f[g.wrap(j)];
  return {g, lo, std::move(taps)};
}

double Kernel::radius() const noexcept {
  return static_cast<double>(std::max(-lo_, hi())) * grid_.spacing();
}

Kernel Kernel::scaled(double factor) const {
  std::vector<double> t(taps_);
  for (double& v : t) v *= factor;
  return {grid_, lo_, std::move(t)};
}

SampledFunction Kernel::to_sampled() const {
  std::vector<double> v(grid_.size(), 0.0);
  for (std::ptrdiff_t j = lo_; j <= hi(); ++j) v[grid_.wrap(j)] += taps_[static_cast<std::size_t>(j - lo_)];
  const double r = radius();
  return {grid_, std::move(v), r < 0.5 ? std::optional<double>(r) : std::nullopt};
}

// ---------------------------------------------------------------------------

namespace {

void check_scale(const DyadicGrid& grid, int k) {
  if (k < 0) throw Error(ErrorKind::invalid_argument, "dilation scale must be nonnegative");
  if (k > grid.n_max() - 2) {
    std::ostringstream msg;
    msg << "scale k=" << k << " too fine for n_max=" << grid.n_max()
        << " (needs k <= n_max - 2)";
    throw Error(ErrorKind::scale_too_fine, msg.str());
  }
}

// Cubic Lagrange interpolation of periodic samples at fractional index t.
double interpolate_cubic(std::span<const double> v, const DyadicGrid& grid, double t) {
  const double base = std::floor(t);
  const double u = t - base;
  const auto i = static_cast<std::ptrdiff_t>(base);
  const double p0 = v[grid.wrap(i - 1)];
  const double p1 = v[grid.wrap(i)];
  const double p2 = v[grid.wrap(i + 1)];
  const double p3 = v[grid.wrap(i + 2)];
  return p0 * (-u * (u - 1.0) * (u - 2.0) / 6.0) + p1 * ((u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0) +
         p2 * (-(u + 1.0) * u * (u - 2.0) / 2.0) + p3 * ((u + 1.0) * u * (u - 1.0) / 6.0);
}

}  // namespace

SampledFunction dilate_translate(const SampledFunction& xi, int k, double x) {
  const DyadicGrid& g = xi.grid();
  check_scale(g, k);
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  const double h = g.spacing();
  const double scale = std::ldexp(1.0, k * g.dim());
  const std::ptrdiff_t factor = std::ptrdiff_t{1} << k;
  const double support = xi.support_radius().value_or(0.5);
  std::vector<double> out(g.size(), 0.0);

  if (g.on_grid(x)) {
    const auto c = static_cast<std::ptrdiff_t>(g.nearest_index(x));
    for (std::ptrdiff_t j = -n / 2 + 1; j <= n / 2; ++j) {
      const std::ptrdiff_t src = j * factor;
      if (std::abs(src) > n / 2) continue;
      if (static_cast<double>(std::abs(src)) * h > support + 1e-12) continue;
      out[g.wrap(c + j)] = scale * xi[g.wrap(src)];
    }
  } else {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double t = std::ldexp(lift(g.point(static_cast<std::ptrdiff_t>(i)) - x), k);
      if (std::abs(t) > std::min(0.5, support)) continue;
      out[i] = scale * interpolate_cubic(xi.values(), g, t / h);
    }
  }
  return {g, std::move(out), support * std::ldexp(1.0, -k)};
}

Kernel dilate_kernel(const SampledFunction& xi, int k) {
  const DyadicGrid& g = xi.grid();
  check_scale(g, k);
  const double h = g.spacing();
  const double scale = std::ldexp(1.0, k * g.dim());
  const std::ptrdiff_t factor = std::ptrdiff_t{1} << k;
  const double support = std::min(xi.support_radius().value_or(0.5), 0.5);
  const auto r = static_cast<std::ptrdiff_t>(std::floor(support * std::ldexp(1.0, -k) / h + 1e-9));
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  // A support reaching the half period covers the torus once.
  const std::ptrdiff_t lo = 2 * r + 1 > n ? -n / 2 + 1 : -r;
  const std::ptrdiff_t hi = 2 * r + 1 > n ? n / 2 : r;
  std::vector<double> taps(static_cast<std::size_t>(hi - lo + 1));
  for (std::ptrdiff_t j = lo; j <= hi; ++j) {
    taps[static_cast<std::size_t>(j - lo)] = scale * xi[g.wrap(j * factor)];
  }
  return {g, lo, std::move(taps)};
}

double quadrature(std::span<const double> values, double h) {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return h * s.value();
}

double quadrature(const SampledFunction& f) { return quadrature(f.values(), f.grid().spacing()); }

namespace detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {}
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};
}  // namespace

std::vector<double> circular_convolve(std::span<const double> a, std::span<const double> b,
                                      double h) {
  if (a.size() != b.size()) throw Error(ErrorKind::grid_mismatch, "convolution of arrays of unequal length");
  const std::size_t n = a.size();
  const std::size_t nc = n / 2 + 1;
  FftwBuffer in(sizeof(double) * n);
  FftwBuffer fa(sizeof(fftw_complex) * nc);
  FftwBuffer fb(sizeof(fftw_complex) * nc);
  auto* real = static_cast<double*>(in.ptr);
  auto* ca = static_cast<fftw_complex*>(fa.ptr);
  auto* cb = static_cast<fftw_complex*>(fb.ptr);

  fftw_plan forward;
  fftw_plan backward;
  {
    // The FFTW planner is not reentrant; execution is.
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, ca, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(n), ca, real, FFTW_ESTIMATE);
  }
  std::copy(a.begin(), a.end(), real);
  fftw_execute_dft_r2c(forward, real, ca);
  std::copy(b.begin(), b.end(), real);
  fftw_execute_dft_r2c(forward, real, cb);
  for (std::size_t i = 0; i < nc; ++i) {
    const std::complex<double> za(ca[i][0], ca[i][1]);
    const std::complex<double> zb(cb[i][0], cb[i][1]);
    const std::complex<double> p = za * zb;
    ca[i][0] = p.real();
    ca[i][1] = p.imag();
  }
  fftw_execute_dft_c2r(backward, ca, real);
  std::vector<double> out(real, real + n);
  const double norm = h / static_cast<double>(n);
  for (double& v : out) v *= norm;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  return out;
}

std::vector<double> centered_difference(std::span<const double> v, double h, int order) {
  const std::size_t n = v.size();
  const auto at = [&](std::ptrdiff_t i) {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return v[static_cast<std::size_t>(((i % m) + m) % m)];
  };
  std::vector<double> out(n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto i = static_cast<std::ptrdiff_t>(s);
    switch (order) {
      case 0: out[s] = v[s]; break;
      case 1: out[s] = (at(i + 1) - at(i - 1)) / (2.0 * h); break;
      case 2: out[s] = (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (h * h); break;
      case 3:
        out[s] = (at(i + 2) - 2.0 * at(i + 1) + 2.0 * at(i - 1) - at(i - 2)) / (2.0 * h * h * h);
        break;
      case 4:
        out[s] = (at(i + 2) - 4.0 * at(i + 1) + 6.0 * at(i) - 4.0 * at(i - 1) + at(i - 2)) /
                 (h * h * h * h);
        break;
      default: throw Error(ErrorKind::invalid_argument, "finite difference order must be in [0, 4]");
    }
  }
  return out;
}

}  // namespace detail

SampledFunction convolve(const SampledFunction& f, const SampledFunction& g) {
  if (!(f.grid() == g.grid())) throw Error(ErrorKind::grid_mismatch, "convolution of functions on different grids");
  const DyadicGrid& grid = f.grid();
  std::vector<double> out = detail::circular_convolve(f.values(), g.values(), grid.spacing());
  std::optional<double> support;
  if (f.support_radius() && g.support_radius()) {
    support = std::min(*f.support_radius() + *g.support_radius(), 0.5);
    if (*support < 0.5) {
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (std::abs(static_cast<double>(grid.lifted_index(i)) * grid.spacing()) > *support + 1e-12) out[i] = 0.0;
      }
    }
  }
  return {grid, std::move(out), support};
}

double ball_average(std::span<const double> values, const DyadicGrid& grid, double x,
                    double radius) {
  const double h = grid.spacing();
  if (radius < 2.0 * h) {
    std::ostringstream msg;
    msg << "ball radius " << radius << " below two grid spacings (" << 2.0 * h << ")";
    throw Error(ErrorKind::radius_under_resolved, msg.str());
  }
  const std::size_t n = values.size();
  if (radius >= 0.5) {
    CompensatedSum s;
    for (double v : values) s.add(v);
    return s.value() / static_cast<double>(n);
  }
  const double c = (x - std::floor(x)) / h;
  const auto first = static_cast<std::ptrdiff_t>(std::floor(c - radius / h)) - 1;
  const auto last = static_cast<std::ptrdiff_t>(std::ceil(c + radius / h)) + 1;
  CompensatedSum num;
  double den = 0.0;
  for (std::ptrdiff_t i = first; i <= last; ++i) {
    const double d = std::abs(static_cast<double>(i) - c) * h;
    const double w = std::clamp((radius + 0.5 * h - d) / h, 0.0, 1.0);
    if (w == 0.0) continue;
    num.add(w * values[grid.wrap(i)]);
    den += w;
  }
  return num.value() / den;
}

double ball_average(const SampledFunction& f, double x, double radius) {
  return ball_average(f.values(), f.grid(), x, radius);
}

double holder_seminorm(const SampledFunction& xi, double r, Exec exec) {
  if (!(r > 0.0)) throw Error(ErrorKind::invalid_argument, "Hoelder order must be positive");
  const int order = static_cast<int>(std::ceil(r)) - 1;
  const double beta = r - order;
  const DyadicGrid& g = xi.grid();
  const double h = g.spacing();
  const std::vector<double> d = detail::centered_difference(xi.values(), h, order);
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  std::ptrdiff_t reach = n / 2 - 1;
  if (xi.support_radius() && *xi.support_radius() < 0.5) {
    reach = std::min<std::ptrdiff_t>(
        reach, static_cast<std::ptrdiff_t>(std::floor(*xi.support_radius() / h + 1e-9)) + order + 1);
  }
  const std::ptrdiff_t m = 2 * reach + 1;
  std::vector<double> window(static_cast<std::size_t>(m));
  for (std::ptrdiff_t j = -reach; j <= reach; ++j) window[static_cast<std::size_t>(j + reach)] = d[g.wrap(j)];

  // Powers of the pair distance depend only on the index gap.
  std::vector<double> inv_dist(static_cast<std::size_t>(m));
  for (std::ptrdiff_t gap = 1; gap < m; ++gap) {
    inv_dist[static_cast<std::size_t>(gap)] = std::pow(static_cast<double>(gap) * h, -beta);
  }
  double best = 0.0;
#pragma omp parallel for schedule(dynamic, 64) reduction(max : best) if (run_parallel(exec))
  for (std::ptrdiff_t a = 0; a < m; ++a) {
    const double va = window[static_cast<std::size_t>(a)];
    for (std::ptrdiff_t b = a + 1; b < m; ++b) {
      const double q = std::abs(va - window[static_cast<std::size_t>(b)]) *
                       inv_dist[static_cast<std::size_t>(b - a)];
      best = std::max(best, q);
    }
  }
  return best;
}

}  // namespace recon
