#include "recon/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace recon {

std::string_view to_string(RegularityMode mode) noexcept {
  return mode == RegularityMode::positive ? "positive" : "negative";
}

RegularityMode parse_regularity_mode(std::string_view name) {
  if (name == "positive") return RegularityMode::positive;
  if (name == "negative") return RegularityMode::negative;
  throw Error(ErrorKind::invalid_argument, "unknown regularity mode '" + std::string(name) + "'");
}

namespace {

void require_scale(const DyadicGrid& g, int n, const char* what) {
  if (n < 0 || n > g.n_max() - 4) {
    std::ostringstream msg;
    msg << what << " at n=" << n << " needs 0 <= n <= n_max - 4 = " << g.n_max() - 4;
    throw Error(ErrorKind::scale_too_fine, msg.str());
  }
}

// h * sum_j values[c + j] taps_j.
double pair(const SampledFunction& f, const Kernel& k, std::ptrdiff_t c) {
  const DyadicGrid& g = f.grid();
  const auto taps = k.taps();
  CompensatedSum s;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    s.add(f[g.wrap(c + k.lo() + static_cast<std::ptrdiff_t>(i))] * taps[i]);
  }
  return g.spacing() * s.value();
}

// F_y(phi_y) at every grid point y.
std::vector<double> diagonal(const Germ& germ, const Kernel& phi, Exec exec) {
  const DyadicGrid& g = phi.grid();
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  std::vector<double> d(g.size());
#pragma omp parallel for schedule(static) if (run_parallel(exec))
  for (std::ptrdiff_t y = 0; y < n; ++y) d[static_cast<std::size_t>(y)] = germ.evaluate(g.point(y), phi, y);
  return d;
}

bool in_region(const DyadicGrid& g, std::ptrdiff_t z, double x_base, std::optional<double> radius) {
  return !radius || torus_distance(g.point(z), x_base) <= *radius + 1e-12;
}

}  // namespace

SampledFunction f_n_field(const Germ& germ, const MollifierStack& stack, int n, Exec exec) {
  const DyadicGrid& g = stack.grid();
  require_scale(g, n, "f_n");
  const Kernel& rho = stack.rho_at(n);
  const auto size = static_cast<std::ptrdiff_t>(g.size());
  std::vector<double> out(g.size());
#pragma omp parallel for schedule(static) if (run_parallel(exec))
  for (std::ptrdiff_t z = 0; z < size; ++z) out[static_cast<std::size_t>(z)] = germ.evaluate(g.point(z), rho, z);
  return {g, std::move(out)};
}

SampledFunction f_x_n_field(const Germ& germ, const MollifierStack& stack, double x_base, int n, Exec exec) {
  const DyadicGrid& g = stack.grid();
  const Kernel& rho = stack.rho_at(n);
  const auto size = static_cast<std::ptrdiff_t>(g.size());
  std::vector<double> out(g.size());
#pragma omp parallel for schedule(static) if (run_parallel(exec))
  for (std::ptrdiff_t z = 0; z < size; ++z) {
    out[static_cast<std::size_t>(z)] = germ.evaluate(g.point(z), rho, z) - germ.evaluate(x_base, rho, z);
  }
  return {g, std::move(out)};
}

TelescopePieces telescope_pieces(const Germ& germ, const MollifierStack& stack, double x_base, int n,
                                 std::optional<double> radius, Exec exec) {
  const DyadicGrid& g = stack.grid();
  require_scale(g, n, "telescope pieces");
  TelescopePieces out{n, SampledFunction::zeros(g), SampledFunction::zeros(g)};
  if (germ.base_point_independent()) return out;

  const Kernel& phi = stack.phi_at(n + 1);
  const Kernel& psi = stack.psi_at(n);
  const double h = g.spacing();
  const auto size = static_cast<std::ptrdiff_t>(g.size());
  const std::vector<double> d = diagonal(germ, phi, exec);
  std::vector<double> a(g.size());
#pragma omp parallel for schedule(static) if (run_parallel(exec))
  for (std::ptrdiff_t y = 0; y < size; ++y) {
    a[static_cast<std::size_t>(y)] = d[static_cast<std::size_t>(y)] - germ.evaluate(x_base, phi, y);
  }

  auto& gp = out.g_prime.mutable_values();
  auto& gpp = out.g_dprime.mutable_values();
#pragma omp parallel for schedule(dynamic, 16) if (run_parallel(exec))
  for (std::ptrdiff_t z = 0; z < size; ++z) {
    if (!in_region(g, z, x_base, radius)) continue;
    const double xz = g.point(z);
    CompensatedSum s1;
    CompensatedSum s2;
    for (std::ptrdiff_t j = psi.lo(); j <= psi.hi(); ++j) {
      const double w = psi.at(j);
      if (w == 0.0) continue;
      const std::size_t y = g.wrap(z + j);
      s1.add(a[y] * w);
      s2.add((germ.evaluate(xz, phi, z + j) - d[y]) * w);
    }
    gp[static_cast<std::size_t>(z)] = h * s1.value();
    gpp[static_cast<std::size_t>(z)] = h * s2.value();
  }
  return out;
}

SampledFunction g_dprime_field(const Germ& germ, const MollifierStack& stack, int n, Exec exec) {
  const DyadicGrid& g = stack.grid();
  require_scale(g, n, "g''");
  SampledFunction out = SampledFunction::zeros(g);
  if (germ.base_point_independent()) return out;
  const Kernel& phi = stack.phi_at(n + 1);
  const Kernel& psi = stack.psi_at(n);
  const double h = g.spacing();
  const auto size = static_cast<std::ptrdiff_t>(g.size());
  const std::vector<double> d = diagonal(germ, phi, exec);
  auto& v = out.mutable_values();
#pragma omp parallel for schedule(dynamic, 16) if (run_parallel(exec))
  for (std::ptrdiff_t z = 0; z < size; ++z) {
    const double xz = g.point(z);
    CompensatedSum s;
    for (std::ptrdiff_t j = psi.lo(); j <= psi.hi(); ++j) {
      const double w = psi.at(j);
      if (w == 0.0) continue;
      s.add((germ.evaluate(xz, phi, z + j) - d[g.wrap(z + j)]) * w);
    }
    v[static_cast<std::size_t>(z)] = h * s.value();
  }
  return out;
}

double telescope_residual(const Germ& germ, const MollifierStack& stack, double x_base, int n, Exec exec) {
  const DyadicGrid& g = stack.grid();
  require_scale(g, n, "telescope residual");
  const SampledFunction lhs = f_x_n_field(germ, stack, x_base, n + 1, exec) - f_x_n_field(germ, stack, x_base, n, exec);
  const TelescopePieces p = telescope_pieces(germ, stack, x_base, n, std::nullopt, exec);
  const auto reach_of = [](const Kernel& k) { return std::max(-k.lo(), k.hi()); };
  const double reach = static_cast<double>(reach_of(stack.psi_at(n)) + reach_of(stack.phi_at(n + 1)) +
                                           reach_of(stack.rho_at(n + 1))) * g.spacing();
  const double cut = x_base + 0.5;
  double resid = 0.0, inc = 0.0, gp = 0.0, gpp = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (torus_distance(g.point(i), cut) <= reach) continue;
    resid = std::max(resid, std::abs(lhs[i] - p.g_prime[i] - p.g_dprime[i]));
    inc = std::max(inc, std::abs(lhs[i]));
    gp = std::max(gp, std::abs(p.g_prime[i]));
    gpp = std::max(gpp, std::abs(p.g_dprime[i]));
  }
  // The two pieces can cancel exactly while each is large.
  return resid / std::max({inc, gp + gpp, std::numeric_limits<double>::min()});
}

Reconstruction reconstruct(const Germ& germ, const MollifierStack& stack, int n_stop, const ReconstructOptions& opts) {
  const DyadicGrid& g = stack.grid();
  require_scale(g, n_stop, "reconstruct");
  Reconstruction rec{f_n_field(germ, stack, n_stop, opts.exec), n_stop, opts.mode, {}, 0.0};
  if (n_stop >= 1) rec.last_increment = (rec.f - f_n_field(germ, stack, n_stop - 1, opts.exec)).sup_norm();
  if (opts.mode == RegularityMode::negative && !germ.base_point_independent()) {
    for (int m = 1; m <= n_stop - 1; ++m) {
      SampledFunction gm = g_dprime_field(germ, stack, m, opts.exec);
      rec.f = rec.f - gm;
      if (opts.record_pieces) rec.g_dprime.push_back(std::move(gm));
    }
  }
  return rec;
}

std::vector<double> increment_sweep(const Germ& germ, const MollifierStack& stack, int n_lo, int n_hi, Exec exec) {
  std::vector<double> out;
  SampledFunction prev = f_n_field(germ, stack, n_lo, exec);
  for (int n = n_lo + 1; n <= n_hi; ++n) {
    SampledFunction cur = f_n_field(germ, stack, n, exec);
    out.push_back((cur - prev).sup_norm());
    prev = std::move(cur);
  }
  return out;
}

TestClassDictionary standard_dictionary(const MollifierStack& stack, double r) {
  const DyadicGrid& g = stack.grid();
  const BumpKind kind = stack.bump_kind();
  const SampledFunction raw = SampledFunction::from_centered(g, [kind](double y) { return bump_profile(kind, y); });
  const double z = quadrature(raw);
  const auto& c = stack.coefficients();

  // phi0^{(1)}(y - s), the half-width bump centred at s.
  const auto half = [&](double y, double s) { return 2.0 * bump_profile(kind, 2.0 * (y - s)) / z; };

  std::vector<SampledFunction> members;
  members.push_back(stack.phi());
  members.push_back(SampledFunction::from_centered(
      g,
      [&](double y) {
        double v = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
          const double s = std::ldexp(1.0, static_cast<int>(i));
          v += c[i] * s * s * bump_profile_derivative(kind, s * y) / z;
        }
        return v;
      },
      0.5));
  members.push_back(SampledFunction::from_centered(g, [&](double y) { return half(y, -0.25); }, 0.5));
  members.push_back(SampledFunction::from_centered(g, [&](double y) { return half(y, 0.25); }, 0.5));
  members.push_back(
      SampledFunction::from_centered(g, [&](double y) { return half(y, -0.25) - half(y, 0.25); }, 0.5));

  TestClassDictionary dict{r, {}};
  for (auto& m : members) {
    const double s = holder_seminorm(m, r);
    dict.members.push_back(m.scaled(1.0 / s));
  }
  return dict;
}

MultiscaleField error_field(const Reconstruction& rec, const Germ& germ, const TestClassDictionary& dict, int k_min,
                            int k_max, const ErrorOptions& opts) {
  if (dict.members.empty()) throw Error(ErrorKind::empty_dictionary, "error field needs a nonempty dictionary");
  if (k_max > rec.n_stop - 2) {
    std::ostringstream msg;
    msg << "error field at k_max=" << k_max << " needs k_max <= n_stop - 2 = " << rec.n_stop - 2;
    throw Error(ErrorKind::scale_too_fine, msg.str());
  }
  const DyadicGrid& g = rec.f.grid();
  MultiscaleField out(g, k_min, k_max, opts.oversample, "Delta");
  for (int k = k_min; k <= k_max; ++k) {
    std::vector<Kernel> tests;
    for (const auto& m : dict.members) tests.push_back(dilate_kernel(m, k));
    const auto count = static_cast<std::ptrdiff_t>(out.count(k));
#pragma omp parallel for schedule(dynamic) if (run_parallel(opts.exec))
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const std::ptrdiff_t c = out.fine_index(k, ju);
      const double x = g.point(c);
      double best = 0.0;
      for (const auto& t : tests) best = std::max(best, std::abs(pair(rec.f, t, c) - germ.evaluate(x, t, c)));
      out.at(k, ju) = best;
    }
  }
  return out;
}

MultiscaleField local_integrability(const Germ& germ, const MollifierStack& stack, int k_min, int k_max,
                                    const CoherenceOptions& opts) {
  const DyadicGrid& g = stack.grid();
  require_scale(g, k_max, "local integrability");
  MultiscaleField out(g, k_min, k_max, opts.oversample, "avg |f_{x,k}|");
  if (germ.base_point_independent()) return out;
  for (int k = k_min; k <= k_max; ++k) {
    const Kernel& rho = stack.rho_at(k);
    const double radius = std::ldexp(1.0, -k - 1);
    const auto count = static_cast<std::ptrdiff_t>(out.count(k));
#pragma omp parallel for schedule(dynamic) if (run_parallel(opts.exec))
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const std::ptrdiff_t c = out.fine_index(k, ju);
      const double x = g.point(c);
      out.at(k, ju) = sampled_ball_mean(g, c, radius, opts.samples_per_radius, [&](std::ptrdiff_t z) {
        return std::abs(germ.evaluate(g.point(z), rho, z) - germ.evaluate(x, rho, z));
      });
    }
  }
  return out;
}

TheoremReport verify_theorem_2_1(const Germ& germ, const MollifierStack& stack, const TheoremRequest& req) {
  req.spec.validate();
  const DyadicGrid& g = stack.grid();
  const int n_stop = req.n_stop.value_or(default_n_stop(g));
  if (req.l_max - req.l_min < 2) throw Error(ErrorKind::invalid_argument, "theorem check needs at least three values of l");

  TheoremReport rep;
  rep.spec = req.spec.describe();
  rep.n_stop = n_stop;

  std::vector<std::pair<int, double>> samples;
  for (int l = req.l_min; l <= req.l_max; ++l) {
    const MultiscaleField c = coherence_coefficients(germ, stack, req.k_min, req.k_max, l, req.coherence);
    samples.emplace_back(l, apply(req.spec, c));
  }
  const AlphaFit fit = fit_alpha_A(samples);
  rep.alpha = fit.alpha;
  rep.A = fit.A;
  if (!(req.r > fit.alpha)) {
    std::ostringstream msg;
    msg << "reconstruction needs r > alpha (r=" << req.r << ", fitted alpha=" << fit.alpha << ")";
    throw Error(ErrorKind::hypothesis_violated, msg.str());
  }

  const Reconstruction rec = reconstruct(germ, stack, n_stop, {RegularityMode::positive, false, req.coherence.exec});
  const TestClassDictionary dict = standard_dictionary(stack, req.r);
  const MultiscaleField delta =
      error_field(rec, germ, dict, req.k_min, req.k_max, {req.coherence.oversample, req.coherence.exec});
  rep.error_norm = apply(req.spec, delta);

  const CoherenceReport h = h_field(germ, stack, req.r, req.k_min, req.k_max, req.l_max + 1, req.coherence);
  const double gamma = req.spec.effective_gamma();
  for (const auto& [l, v] : samples) {
    TheoremLevel lv;
    lv.l = l;
    lv.coefficient_norm = v;
    lv.coefficient_bound = std::exp2(l * fit.alpha) * fit.A;
    lv.second_sum_norm = apply(req.spec, h.second_terms[static_cast<std::size_t>(l)]);
    lv.second_sum_bound = std::exp2(-l * gamma) * fit.A;
    rep.levels.push_back(lv);
  }

  rep.degenerate = fit.A == 0.0;
  rep.ratio = rep.degenerate ? 0.0 : rep.error_norm / fit.A;
  rep.pass = rep.degenerate || rep.error_norm <= C_thm * fit.A;
  return rep;
}

}  // namespace recon
