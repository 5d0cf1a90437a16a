#include "recon/sewing.hpp"

#include <cmath>
#include <sstream>

#include "recon/reconstruct.hpp"

namespace recon {

std::string_view to_string(SewRoute route) noexcept {
  return route == SewRoute::reconstruction ? "reconstruction" : "diagonal-oracle";
}

double SewnPath::value(double x) const {
  const DyadicGrid& grid = g.grid();
  const auto n = static_cast<long long>(grid.size());
  const long long i = std::llround(x / grid.spacing());
  long long period = i / n;
  long long rem = i % n;
  if (rem < 0) {
    rem += n;
    --period;
  }
  return g[static_cast<std::size_t>(rem)] + static_cast<double>(period) * drift;
}

double delta1(const SewnPath& g, double s, double t) { return g.value(t) - g.value(s); }

double delta2(const TwoParam& A, double s, double u, double t) { return A(s, t) - A(s, u) - A(u, t); }

ThreeParam delta2_process(TwoParam A) {
  return [A = std::move(A)](double s, double u, double t) { return delta2(A, s, u, t); };
}

TwoParam antisymmetrize(TwoParam A) {
  return [A = std::move(A)](double s, double t) { return s <= t ? A(s, t) : -A(t, s); };
}

namespace {

std::ptrdiff_t offset_step(double radius, double h, int per_radius) {
  if (per_radius <= 0) return 1;
  return std::max<std::ptrdiff_t>(1, static_cast<std::ptrdiff_t>(std::floor(radius / h / per_radius)));
}

std::vector<double> base_points(const DyadicGrid& grid, int x_level) {
  const int lvl = x_level <= 0 ? grid.n_max() : std::min(grid.n_max(), x_level);
  const std::size_t m = std::size_t{1} << lvl;
  std::vector<double> xs(m);
  for (std::size_t i = 0; i < m; ++i) xs[i] = std::ldexp(static_cast<double>(i), -lvl);
  return xs;
}

double lp_mean(const std::vector<double>& xs, double p, const std::function<double(double)>& fn) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : xs) m = std::max(m, std::abs(fn(x)));
    return m;
  }
  CompensatedSum s;
  for (double x : xs) s.add(std::pow(std::abs(fn(x)), p));
  return std::pow(s.value() / static_cast<double>(xs.size()), 1.0 / p);
}

double lq_combine(const std::vector<double>& terms, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double t : terms) m = std::max(m, t);
    return m;
  }
  CompensatedSum s;
  for (double t : terms) s.add(std::pow(t, q));
  return std::pow(s.value(), 1.0 / q);
}

void check_norm_args(double eta, double p, double q, int k_min, int k_max) {
  if (!(eta > 0.0)) throw Error(ErrorKind::invalid_argument, "sewing norms need eta > 0");
  if (!(p > 0.0) || !(q > 0.0)) throw Error(ErrorKind::invalid_argument, "sewing norms need p, q > 0");
  if (k_min < 0 || k_max < k_min) throw Error(ErrorKind::invalid_argument, "invalid scale range for sewing norm");
}

}  // namespace

double b_norm(const TwoParam& A, const DyadicGrid& grid, double eta, double p, double q, int k_min, int k_max,
              const NormOptions& opts) {
  check_norm_args(eta, p, q, k_min, k_max);
  const double h = grid.spacing();
  const std::vector<double> xs = base_points(grid, opts.x_level);
  std::vector<double> terms;
  for (int k = k_min; k <= k_max; ++k) {
    const double radius = std::ldexp(1.0, -k);
    const std::ptrdiff_t s = offset_step(radius, h, opts.offsets_per_radius);
    const auto reach = static_cast<std::ptrdiff_t>(std::floor(radius / h + 1e-9));
    const std::ptrdiff_t count = reach / s;
    double best = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : best) if (run_parallel(opts.exec))
    for (std::ptrdiff_t j = -count; j <= count; ++j) {
      const double off = static_cast<double>(j * s) * h;
      best = std::max(best, lp_mean(xs, p, [&](double x) { return A(x, x + off); }));
    }
    terms.push_back(std::exp2(eta * k) * best);
  }
  return lq_combine(terms, q);
}

double bbar_norm(const ThreeParam& G, const DyadicGrid& grid, double eta, double p, double q, int k_min, int k_max,
                 const NormOptions& opts) {
  check_norm_args(eta, p, q, k_min, k_max);
  const double h = grid.spacing();
  const std::vector<double> xs = base_points(grid, opts.x_level);
  std::vector<double> terms;
  for (int k = k_min; k <= k_max; ++k) {
    const double radius = std::ldexp(1.0, -k + 1);
    const std::ptrdiff_t s = offset_step(radius, h, opts.offsets_per_radius);
    const auto reach = static_cast<std::ptrdiff_t>(std::floor(radius / h + 1e-9));
    const std::ptrdiff_t count = reach / s;
    const std::ptrdiff_t width = 2 * count + 1;
    double best = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : best) if (run_parallel(opts.exec))
    for (std::ptrdiff_t idx = 0; idx < width * width; ++idx) {
      const double a = static_cast<double>((idx / width - count) * s) * h;
      const double b = static_cast<double>((idx % width - count) * s) * h;
      best = std::max(best, lp_mean(xs, p, [&](double x) { return G(x, x + a, x + b); }));
    }
    terms.push_back(std::exp2(eta * k) * best);
  }
  return lq_combine(terms, q);
}

SewnPath antiderivative(const SampledFunction& f, SewRoute route) {
  const DyadicGrid& grid = f.grid();
  const double h = grid.spacing();
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  const auto at = [&](std::ptrdiff_t i) { return f[grid.wrap(i)]; };
  const auto slope = [&](std::ptrdiff_t i) {
    return (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * h);
  };
  // Trapezoid with the h^2 end correction.
  const double s0 = slope(0);
  std::vector<double> g(grid.size(), 0.0);
  CompensatedSum acc;
  for (std::ptrdiff_t i = 1; i < n; ++i) {
    acc.add(0.5 * h * (at(i - 1) + at(i)));
    g[static_cast<std::size_t>(i)] = acc.value() - h * h / 12.0 * (slope(i) - s0);
  }
  return {SampledFunction(grid, std::move(g)), quadrature(f), route};
}

namespace {

// Cumulative three-point Gauss-Legendre integral of u -> fn(u) over the grid cells.
SewnPath integrate_closed_form(const DyadicGrid& grid, const std::function<double(double)>& fn) {
  const double h = grid.spacing();
  const double node = std::sqrt(0.6) / 2.0;
  const auto cell = [&](double a) {
    const double m = a + 0.5 * h;
    return h * (5.0 * fn(m - node * h) + 8.0 * fn(m) + 5.0 * fn(m + node * h)) / 18.0;
  };
  std::vector<double> g(grid.size(), 0.0);
  CompensatedSum acc;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    acc.add(cell(static_cast<double>(i - 1) * h));
    g[i] = acc.value();
  }
  acc.add(cell(static_cast<double>(grid.size() - 1) * h));
  return {SampledFunction(grid, std::move(g)), acc.value(), SewRoute::diagonal_oracle};
}

}  // namespace

SewnPath sew(const TwoParamProcess& A, const MollifierStack& stack, const SewOptions& opts, SewRoute route) {
  if (!(opts.eta > 1.0)) {
    std::ostringstream msg;
    msg << "sewing needs eta > 1 (got " << opts.eta << ")";
    throw Error(ErrorKind::hypothesis_violated, msg.str());
  }
  if (!(opts.r > 1.0)) {
    std::ostringstream msg;
    msg << "sewing needs r > 1 (got " << opts.r << ")";
    throw Error(ErrorKind::hypothesis_violated, msg.str());
  }
  if (opts.p < 1.0) throw Error(ErrorKind::invalid_argument, "sewing is only available for p >= 1");
  const DyadicGrid& grid = stack.grid();
  if (route == SewRoute::diagonal_oracle) {
    return integrate_closed_form(grid, [&A](double u) { return A.d2(u, u); });
  }
  const SewingGerm germ(A);
  const Reconstruction rec =
      reconstruct(germ, stack, opts.n_stop.value_or(default_n_stop(grid)), {RegularityMode::positive, false, opts.exec});
  return antiderivative(rec.f, SewRoute::reconstruction);
}

std::vector<double> riemann_stieltjes(const SmoothFunction& f, const SmoothFunction& g, int mesh_level) {
  if (mesh_level < 0 || mesh_level > 26) throw Error(ErrorKind::invalid_argument, "mesh level out of range");
  const std::size_t m = std::size_t{1} << mesh_level;
  const double dt = std::ldexp(1.0, -mesh_level);
  std::vector<double> out(m + 1, 0.0);
  CompensatedSum acc;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = static_cast<double>(i) * dt;
    const double b = a + dt;
    acc.add(f(a + 0.5 * dt) * (g(b) - g(a)));
    out[i + 1] = acc.value();
  }
  return out;
}

SewingBoundReport sewing_bound(const TwoParamProcess& A, const SewnPath& path, double eta, double p, double q,
                               int k_min, int k_max, const NormOptions& opts) {
  const DyadicGrid& grid = path.g.grid();
  const TwoParam remainder = [&](double s, double t) { return delta1(path, s, t) - A.value(s, t); };
  SewingBoundReport rep;
  rep.remainder_norm = b_norm(remainder, grid, eta, p, q, k_min, k_max, opts);
  rep.delta_norm = bbar_norm(delta2_process(A.value), grid, eta, p, q, k_min, k_max, opts);
  rep.ratio = rep.delta_norm > 0.0 ? rep.remainder_norm / rep.delta_norm : 0.0;
  rep.pass = rep.remainder_norm <= C_sew * rep.delta_norm;
  return rep;
}

double chi_tilde(double theta) noexcept {
  if (theta < 0.0 || theta >= 0.6) return 0.0;
  if (theta <= 0.4) return 1.0;
  const double u = (theta - 0.4) / 0.2;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return b / (a + b);
}

double chi(double theta) noexcept { return chi_tilde(theta) - chi_tilde(2.0 * theta); }

ChiPartitionReport chi_partition_check(const DyadicGrid& grid) {
  const double h = grid.spacing();
  ChiPartitionReport rep;
  rep.samples = static_cast<int>(grid.size()) - 1;
  // Beyond this level 2^l theta > 1 for every interior grid theta, so chi vanishes.
  rep.levels = grid.n_max() + 1;
  rep.support_lo = 1.0;
  rep.support_hi = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double theta = static_cast<double>(i) * h;
    CompensatedSum s;
    for (int l = 0; l <= rep.levels; ++l) {
      const double scale = std::ldexp(1.0, l);
      s.add(chi(scale * theta));
      s.add(chi(scale * (1.0 - theta)));
    }
    rep.max_residual = std::max(rep.max_residual, std::abs(s.value() - 1.0));
    const double c = chi(theta);
    if (c != 0.0) {
      rep.support_lo = std::min(rep.support_lo, theta);
      rep.support_hi = std::max(rep.support_hi, theta);
      if (theta < 0.2 || theta > 0.6) rep.support_leak = std::max(rep.support_leak, std::abs(c));
    }
  }
  if (rep.max_residual > 1e-10 || rep.support_leak > 0.0) {
    std::ostringstream msg;
    msg << "chi partition fails: residual " << rep.max_residual << ", support leak " << rep.support_leak;
    throw Error(ErrorKind::partition_residual, msg.str());
  }
  return rep;
}

}  // namespace recon
