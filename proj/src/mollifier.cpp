#include "recon/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace recon {

std::string_view to_string(BumpKind kind) noexcept {
  return kind == BumpKind::exponential ? "exponential" : "polynomial";
}

BumpKind parse_bump_kind(std::string_view name) {
  if (name == "exponential" || name == "exp") return BumpKind::exponential;
  if (name == "polynomial" || name == "poly") return BumpKind::polynomial;
  throw Error(ErrorKind::invalid_argument, "unknown bump kind '" + std::string(name) + "'");
}

double bump_profile(BumpKind kind, double y) noexcept {
  const double u = 1.0 - 4.0 * y * y;
  if (u <= 0.0) return 0.0;
  if (kind == BumpKind::exponential) return std::exp(-1.0 / u);
  const double u2 = u * u;
  const double u4 = u2 * u2;
  return u4 * u4;
}

double bump_profile_derivative(BumpKind kind, double y) noexcept {
  const double u = 1.0 - 4.0 * y * y;
  if (u <= 0.0) return 0.0;
  if (kind == BumpKind::exponential) return std::exp(-1.0 / u) * (-8.0 * y) / (u * u);
  return 8.0 * std::pow(u, 7) * (-8.0 * y);
}

SampledFunction base_bump(const DyadicGrid& grid, BumpKind kind) {
  if (grid.n_max() < 8) {
    throw Error(ErrorKind::invalid_argument, "base bump needs n_max >= 8");
  }
  SampledFunction raw = SampledFunction::from_centered(
      grid, [kind](double y) { return bump_profile(kind, y); }, 0.5);
  return raw.scaled(1.0 / quadrature(raw));
}

double moment(const SampledFunction& f, int alpha) {
  const DyadicGrid& g = f.grid();
  const double h = g.spacing();
  CompensatedSum s;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double y = static_cast<double>(g.lifted_index(i)) * h;
    s.add(std::pow(y, alpha) * f[i]);
  }
  return h * s.value();
}

int r_tilde_for(double r) {
  if (!(r > 0.0)) throw Error(ErrorKind::invalid_argument, "Hoelder order r must be positive");
  return static_cast<int>(std::ceil(r)) - 1;
}

namespace {

// Gaussian elimination with partial pivoting on a tiny dense system.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
    }
    if (std::abs(a[piv][col]) < 1e-14) {
      throw Error(ErrorKind::singular_system, "moment system is singular");
    }
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const double f = a[row][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace

MomentCancellation moment_cancel(const SampledFunction& phi0, int r_tilde) {
  if (r_tilde < 0 || r_tilde > 4) {
    throw Error(ErrorKind::invalid_argument, "r_tilde must lie in [0, 4]");
  }
  const double mass = quadrature(phi0);
  if (std::abs(mass - 1.0) > 1e-10) {
    throw Error(ErrorKind::invalid_argument, "moment cancellation needs a unit-mass base bump");
  }

  // Rows with a vanishing base moment hold for every choice of weights.
  std::vector<int> rows{0};
  for (int alpha = 1; alpha <= r_tilde; ++alpha) {
    if (std::abs(moment(phi0, alpha)) > 1e-12 * std::ldexp(1.0, -alpha)) rows.push_back(alpha);
  }
  const std::size_t p = rows.size();

  std::vector<double> c;
  if (p == 1) {
    c = {1.0};
  } else if (p == 2) {
    const double node = std::ldexp(1.0, -rows[1]);
    const double c1 = 1.0 / (1.0 - node);
    c = {1.0 - c1, c1};
  } else {
    std::vector<std::vector<double>> a(p, std::vector<double>(p));
    std::vector<double> b(p, 0.0);
    b[0] = 1.0;
    for (std::size_t row = 0; row < p; ++row) {
      for (std::size_t i = 0; i < p; ++i) {
        a[row][i] = std::ldexp(1.0, -static_cast<int>(i) * rows[row]);
      }
    }
    c = solve_dense(std::move(a), std::move(b));
  }

  SampledFunction phi = phi0.scaled(c[0]);
  for (std::size_t i = 1; i < p; ++i) {
    phi = phi + dilate_translate(phi0, static_cast<int>(i), 0.0).scaled(c[i]);
  }

  const double mass_err = std::abs(quadrature(phi) - 1.0);
  if (mass_err > 1e-10) {
    std::ostringstream msg;
    msg << "moment-cancelled mollifier has mass error " << mass_err << " (grid under-resolved)";
    throw Error(ErrorKind::moment_residual, msg.str());
  }
  for (int alpha = 1; alpha <= r_tilde; ++alpha) {
    const double m = std::abs(moment(phi, alpha));
    if (m > 1e-8) {
      std::ostringstream msg;
      msg << "moment of order " << alpha << " is " << m << " after cancellation (grid under-resolved)";
      throw Error(ErrorKind::moment_residual, msg.str());
    }
  }
  return {SampledFunction(phi.grid(), std::vector<double>(phi.values().begin(), phi.values().end()), 0.5),
          std::move(c)};
}

// ---------------------------------------------------------------------------

namespace {

Kernel unit_mass(const Kernel& k) { return k.scaled(1.0 / k.mass()); }

// Adds |t_j| P(j / R), deg P <= r_tilde, to the taps t so that the discrete
// moments of orders 1..r_tilde vanish and the mass is kept. Subsampled dilates
// lose these moments at coarse resolution. Kernels with too few nonzero taps
// are returned unchanged.
Kernel cancel_discrete_moments(const Kernel& k, int r_tilde) {
  if (r_tilde == 0) return k;
  const auto taps = k.taps();
  const auto nonzero = std::count_if(taps.begin(), taps.end(), [](double t) { return t != 0.0; });
  if (nonzero <= 2 * r_tilde + 1) return k;
  const double reach = static_cast<double>(std::max(-k.lo(), k.hi()));
  const double h = k.grid().spacing();
  const auto p = static_cast<std::size_t>(r_tilde + 1);
  std::vector<double> mu(p, 0.0), nu(2 * p - 1, 0.0);
  for (std::ptrdiff_t j = k.lo(); j <= k.hi(); ++j) {
    const double u = static_cast<double>(j) / reach;
    double pw = h;
    for (std::size_t b = 0; b < nu.size(); ++b) {
      if (b < p) mu[b] += pw * k.at(j);
      nu[b] += pw * std::abs(k.at(j));
      pw *= u;
    }
  }
  std::vector<std::vector<double>> a(p, std::vector<double>(p));
  std::vector<double> rhs(p);
  for (std::size_t row = 0; row < p; ++row) {
    for (std::size_t i = 0; i < p; ++i) a[row][i] = nu[row + i];
    rhs[row] = row == 0 ? 0.0 : -mu[row];
  }
  const std::vector<double> c = solve_dense(std::move(a), std::move(rhs));
  std::vector<double> out(taps.begin(), taps.end());
  for (std::ptrdiff_t j = k.lo(); j <= k.hi(); ++j) {
    const double u = static_cast<double>(j) / reach;
    double poly = 0.0;
    for (std::size_t i = p; i-- > 0;) poly = poly * u + c[i];
    out[static_cast<std::size_t>(j - k.lo())] += std::abs(k.at(j)) * poly;
  }
  return unit_mass(Kernel(k.grid(), k.lo(), std::move(out)));
}

Kernel restrict_to_radius(const DyadicGrid& g, const std::vector<double>& full, double radius) {
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  std::ptrdiff_t lo = -n / 2 + 1;
  std::ptrdiff_t hi = n / 2;
  if (radius < 0.5) {
    const auto r = static_cast<std::ptrdiff_t>(std::floor(radius / g.spacing() + 1e-9));
    lo = -r;
    hi = r;
  }
  std::vector<double> taps(static_cast<std::size_t>(hi - lo + 1));
  for (std::ptrdiff_t j = lo; j <= hi; ++j) taps[static_cast<std::size_t>(j - lo)] = full[g.wrap(j)];
  return {g, lo, std::move(taps)};
}

Kernel kernel_difference(const Kernel& a, const Kernel& b) {
  const std::ptrdiff_t lo = std::min(a.lo(), b.lo());
  const std::ptrdiff_t hi = std::max(a.hi(), b.hi());
  std::vector<double> taps(static_cast<std::size_t>(hi - lo + 1));
  for (std::ptrdiff_t j = lo; j <= hi; ++j) taps[static_cast<std::size_t>(j - lo)] = a.at(j) - b.at(j);
  return {a.grid(), lo, std::move(taps)};
}

std::vector<double> full_values(const Kernel& k) {
  auto s = k.to_sampled();
  return {s.values().begin(), s.values().end()};
}

}  // namespace

MollifierStack::MollifierStack(DyadicGrid grid, double r, int r_tilde, BumpKind kind,
                               std::vector<double> coefficients, SampledFunction phi,
                               SampledFunction rho, SampledFunction psi)
    : grid_(grid),
      r_(r),
      r_tilde_(r_tilde),
      kind_(kind),
      coefficients_(std::move(coefficients)),
      phi_(std::move(phi)),
      rho_(std::move(rho)),
      psi_(std::move(psi)) {
  const int top = grid_.n_max() - 2;
  phi_scales_.reserve(static_cast<std::size_t>(top + 1));
  for (int n = 0; n <= top; ++n) {
    phi_scales_.push_back(cancel_discrete_moments(unit_mass(dilate_kernel(phi_, n)), r_tilde_));
  }
  for (int n = 0; n + 2 <= top; ++n) {
    psi_scales_.push_back(kernel_difference(phi_scales_[static_cast<std::size_t>(n + 2)],
                                            phi_scales_[static_cast<std::size_t>(n)]));
  }
  const double h = grid_.spacing();
  for (int n = 0; n + 1 <= top; ++n) {
    const auto conv = detail::circular_convolve(full_values(phi_scales_[static_cast<std::size_t>(n + 1)]),
                                                full_values(phi_scales_[static_cast<std::size_t>(n)]), h);
    rho_scales_.push_back(restrict_to_radius(grid_, conv, 0.75 * std::ldexp(1.0, -n)));
  }
}

MollifierStack MollifierStack::build(const DyadicGrid& grid, double r, BumpKind kind) {
  const int rt = r_tilde_for(r);
  if (rt > 4) throw Error(ErrorKind::invalid_argument, "Hoelder order r > 5 exceeds the moment cap r~ <= 4");
  const SampledFunction phi0 = base_bump(grid, kind);
  MomentCancellation mc = moment_cancel(phi0, rt);
  const SampledFunction phi1 = dilate_translate(mc.phi, 1, 0.0);
  const SampledFunction conv = convolve(phi1, mc.phi);
  SampledFunction rho(grid, std::vector<double>(conv.values().begin(), conv.values().end()), 0.75);
  SampledFunction psi = dilate_translate(mc.phi, 2, 0.0) - mc.phi;
  return MollifierStack(grid, r, rt, kind, std::move(mc.coefficients), std::move(mc.phi), std::move(rho),
                        std::move(psi));
}

namespace {
template <class V>
const Kernel& scale_entry(const V& v, int n, const char* what) {
  if (n < 0 || n >= static_cast<int>(v.size())) {
    std::ostringstream msg;
    msg << what << " scale " << n << " not resolved on this grid (available 0.." << v.size() - 1 << ")";
    throw Error(ErrorKind::scale_too_fine, msg.str());
  }
  return v[static_cast<std::size_t>(n)];
}
}  // namespace

const Kernel& MollifierStack::phi_at(int n) const { return scale_entry(phi_scales_, n, "phi"); }
const Kernel& MollifierStack::rho_at(int n) const { return scale_entry(rho_scales_, n, "rho"); }
const Kernel& MollifierStack::psi_at(int n) const { return scale_entry(psi_scales_, n, "psi"); }

// ---------------------------------------------------------------------------

namespace {

// rho on the real line, offsets -3N/4 .. 3N/4, from a zero-padded product.
std::vector<double> rho_on_line(const MollifierStack& stack) {
  const DyadicGrid& g = stack.grid();
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  const std::size_t len = 2 * g.size();
  std::vector<double> a(len, 0.0);
  std::vector<double> b(len, 0.0);
  const auto place = [&](std::vector<double>& dst, const Kernel& k) {
    for (std::ptrdiff_t j = k.lo(); j <= k.hi(); ++j) {
      dst[static_cast<std::size_t>((j + 2 * n) % (2 * n))] = k.at(j);
    }
  };
  place(a, stack.phi_at(1));
  place(b, stack.phi_at(0));
  const auto conv = detail::circular_convolve(a, b, g.spacing());
  const std::ptrdiff_t reach = 3 * n / 4;
  std::vector<double> line(static_cast<std::size_t>(2 * reach + 1));
  for (std::ptrdiff_t j = -reach; j <= reach; ++j) {
    line[static_cast<std::size_t>(j + reach)] = conv[static_cast<std::size_t>((j + 2 * n) % (2 * n))];
  }
  return line;
}

std::vector<double> resampled_rho(const DyadicGrid& g, const std::vector<double>& line, int m) {
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  const std::ptrdiff_t reach = 3 * n / 4;
  const std::ptrdiff_t factor = std::ptrdiff_t{1} << m;
  const double scale = std::ldexp(1.0, m);
  std::vector<double> out(g.size(), 0.0);
  for (std::ptrdiff_t j = -reach; j <= reach; ++j) {
    if (j * factor > reach || j * factor < -reach) continue;
    // Offsets beyond the half period wrap, periodising rho at m = 0.
    out[g.wrap(j)] += scale * line[static_cast<std::size_t>(j * factor + reach)];
  }
  return out;
}

}  // namespace

double check_telescope_identity(const MollifierStack& stack, int n, const TelescopeCheck& opts) {
  const DyadicGrid& g = stack.grid();
  if (n < 0) throw Error(ErrorKind::invalid_argument, "telescope scale must be nonnegative");
  if (n > g.n_max() - 6) {
    std::ostringstream msg;
    msg << "telescope check at n=" << n << " needs n <= n_max - 6 = " << g.n_max() - 6;
    throw Error(ErrorKind::scale_too_fine, msg.str());
  }
  std::vector<double> upper;
  std::vector<double> lower;
  if (opts.route == TelescopeRoute::discrete) {
    upper = full_values(stack.rho_at(n + 1));
    lower = full_values(stack.rho_at(n));
  } else {
    const auto line = rho_on_line(stack);
    upper = resampled_rho(g, line, n + 1);
    lower = resampled_rho(g, line, n);
  }
  std::vector<double> rhs(g.size(), 0.0);
  if (!opts.suppress_psi) {
    rhs = detail::circular_convolve(full_values(stack.phi_at(n + 1)), full_values(stack.psi_at(n)),
                                    g.spacing());
  }
  double resid = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    resid = std::max(resid, std::abs((upper[i] - lower[i]) - rhs[i]));
    scale = std::max(scale, std::abs(upper[i]));
  }
  return resid / scale;
}

}  // namespace recon
