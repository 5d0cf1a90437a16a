#include "recon/coherence.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace recon {

MultiscaleField::MultiscaleField(DyadicGrid grid, int k_min, int k_max, int oversample, std::string meta)
    : grid_(grid), k_min_(k_min), k_max_(k_max), oversample_(oversample), meta_(std::move(meta)) {
  if (k_min < 0 || k_max < k_min) {
    std::ostringstream msg;
    msg << "invalid scale range [" << k_min << ", " << k_max << "]";
    throw Error(ErrorKind::invalid_argument, msg.str());
  }
  if (oversample < 1) throw Error(ErrorKind::invalid_argument, "oversample must be at least 1");
  levels_.reserve(static_cast<std::size_t>(k_max - k_min + 1));
  for (int k = k_min; k <= k_max; ++k) {
    const int lvl = std::min(grid.n_max(), std::max(DyadicGrid::min_level, k + oversample));
    DyadicGrid lg(lvl);
    levels_.push_back({lg, std::vector<double>(lg.size(), 0.0)});
  }
}

double MultiscaleField::sup() const noexcept {
  double m = 0.0;
  for (const auto& l : levels_) {
    for (double v : l.values) m = std::max(m, std::abs(v));
  }
  return m;
}

bool MultiscaleField::all_finite() const noexcept {
  for (const auto& l : levels_) {
    for (double v : l.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

MultiscaleField MultiscaleField::scaled(double factor) const {
  MultiscaleField out = *this;
  for (auto& l : out.levels_) {
    for (double& v : l.values) v *= factor;
  }
  return out;
}

MultiscaleField MultiscaleField::operator+(const MultiscaleField& other) const {
  if (!(grid_ == other.grid_) || k_min_ != other.k_min_ || k_max_ != other.k_max_ ||
      oversample_ != other.oversample_) {
    throw Error(ErrorKind::grid_mismatch, "multiscale fields have different layouts");
  }
  MultiscaleField out = *this;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    for (std::size_t j = 0; j < levels_[i].values.size(); ++j) out.levels_[i].values[j] += other.levels_[i].values[j];
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// (F_a - F_b)(test centred at c).
double germ_difference(const Germ& germ, const Kernel& test, std::ptrdiff_t a, std::ptrdiff_t b, std::ptrdiff_t c) {
  const DyadicGrid& g = test.grid();
  return germ.evaluate(g.point(a), test, c) - germ.evaluate(g.point(b), test, c);
}

void check_budget(const DyadicGrid& g, int k_max, int depth, const char* what) {
  if (k_max + depth > g.n_max() - 2) {
    std::ostringstream msg;
    msg << what << ": k_max + " << depth << " = " << k_max + depth << " exceeds n_max - 2 = " << g.n_max() - 2;
    throw Error(ErrorKind::scale_budget_exceeded, msg.str());
  }
}

double first_term(const Germ& germ, const Kernel& phi, std::ptrdiff_t x, double radius, int per_radius) {
  return sampled_ball_mean(phi.grid(), x, radius, per_radius, [&](std::ptrdiff_t y) {
    return std::abs(germ_difference(germ, phi, y, x, y));
  });
}

}  // namespace

CoherenceReport h_field(const Germ& germ, const MollifierStack& stack, double r, int k_min, int k_max, int L,
                        const CoherenceOptions& opts) {
  const DyadicGrid& g = stack.grid();
  if (!(r > 0.0)) throw Error(ErrorKind::invalid_argument, "h_field needs r > 0");
  if (L < 1) throw Error(ErrorKind::invalid_argument, "truncation L must be at least 1");
  check_budget(g, k_max, L, "h_field");

  const MultiscaleField layout(g, k_min, k_max, opts.oversample);
  CoherenceReport rep{layout, L, layout, false, {}, {}};
  rep.field.set_meta("H");
  rep.tail.set_meta("H tail");
  rep.first_terms.assign(static_cast<std::size_t>(L), layout);
  const bool negative = opts.mode == RegularityMode::negative;
  rep.second_terms.assign(static_cast<std::size_t>(negative ? k_max + 1 : L), layout);

  if (germ.base_point_independent()) return rep;

  bool divergent = false;
  for (int k = k_min; k <= k_max; ++k) {
    const auto count = static_cast<std::ptrdiff_t>(layout.count(k));
    const double outer = std::ldexp(1.0, -k);
#pragma omp parallel for schedule(dynamic) reduction(|| : divergent) if (run_parallel(opts.exec))
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const std::ptrdiff_t x = layout.fine_index(k, ju);
      std::vector<double> t(static_cast<std::size_t>(L));
      for (int l = 0; l < L; ++l) {
        const Kernel& phi = stack.phi_at(k + l);
        const double inner = std::ldexp(1.0, -k - l);
        const double a = std::pow(2.0, -l * r) * first_term(germ, phi, x, outer, opts.samples_per_radius);
        rep.first_terms[static_cast<std::size_t>(l)].at(k, ju) = a;
        t[static_cast<std::size_t>(l)] = a;
        if (negative) continue;
        const double b = sampled_ball_mean(g, x, outer, opts.samples_per_radius, [&](std::ptrdiff_t z) {
          return sampled_ball_mean(g, z, inner, opts.samples_per_radius, [&](std::ptrdiff_t y) {
            return std::abs(germ_difference(germ, phi, z, y, y));
          });
        });
        rep.second_terms[static_cast<std::size_t>(l)].at(k, ju) = b;
        t[static_cast<std::size_t>(l)] += b;
      }

      CompensatedSum total;
      for (double v : t) total.add(v);
      for (int m = 0; negative && m <= k; ++m) {
        const Kernel& phi = stack.phi_at(k - m);
        const double inner = std::ldexp(1.0, m - k);
        const double b = sampled_ball_mean(g, x, outer, opts.samples_per_radius, [&](std::ptrdiff_t z) {
          return sampled_ball_mean(g, z, inner, opts.samples_per_radius, [&](std::ptrdiff_t y) {
            return std::abs(germ_difference(germ, phi, z, y, y));
          });
        });
        rep.second_terms[static_cast<std::size_t>(m)].at(k, ju) = b;
        total.add(b);
      }
      rep.field.at(k, ju) = total.value();

      // A term at round-off level relative to the leading one counts as decayed.
      const double floor = 1e-13 * std::max(t.front(), std::numeric_limits<double>::min());
      double tail = 0.0;
      if (L >= 2 && t[static_cast<std::size_t>(L - 1)] > floor) {
        const double q = t[static_cast<std::size_t>(L - 1)] / t[static_cast<std::size_t>(L - 2)];
        tail = q < 1.0 ? t[static_cast<std::size_t>(L - 1)] * q / (1.0 - q) : std::numeric_limits<double>::infinity();
      }
      rep.tail.at(k, ju) = tail;

      for (int l = std::max(1, L - divergence_window); l < L; ++l) {
        const double prev = t[static_cast<std::size_t>(l - 1)];
        const double cur = t[static_cast<std::size_t>(l)];
        if (cur > floor && cur > divergence_ratio * prev) divergent = true;
      }
    }
  }
  rep.divergence_flag = divergent;
  rep.field.set_divergent(divergent);
  return rep;
}

MultiscaleField coherence_coefficients(const Germ& germ, const MollifierStack& stack, int k_min, int k_max, int l,
                                       const CoherenceOptions& opts) {
  const DyadicGrid& g = stack.grid();
  if (l < 0) throw Error(ErrorKind::invalid_argument, "coherence coefficients need l >= 0");
  check_budget(g, k_max, l, "coherence_coefficients");
  MultiscaleField out(g, k_min, k_max, opts.oversample);
  {
    std::ostringstream meta;
    meta << "coherence coefficients l=" << l;
    out.set_meta(meta.str());
  }
  if (germ.base_point_independent()) return out;
  for (int k = k_min; k <= k_max; ++k) {
    const Kernel& phi = stack.phi_at(k + l);
    const double radius = std::ldexp(1.0, -k);
    const auto count = static_cast<std::ptrdiff_t>(out.count(k));
#pragma omp parallel for schedule(dynamic) if (run_parallel(opts.exec))
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      out.at(k, ju) = first_term(germ, phi, out.fine_index(k, ju), radius, opts.samples_per_radius);
    }
  }
  return out;
}

double log2_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::invalid_argument, "slope fit needs at least two matched samples");
  }
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = 0.0;
  for (double v : y) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::nonpositive_value, "slope fit needs positive finite data");
    my += std::log2(v);
  }
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (std::log2(y[i]) - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

AlphaFit fit_alpha_A(std::span<const std::pair<int, double>> samples) {
  if (samples.size() < 3) throw Error(ErrorKind::invalid_argument, "fit_alpha_A needs at least three values of l");
  bool all_zero = true;
  for (const auto& [l, v] : samples) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::nonpositive_value, "coherence values must be finite and >= 0");
    if (v != 0.0) all_zero = false;
  }
  if (all_zero) return {};
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& [l, v] : samples) {
    if (v == 0.0) throw Error(ErrorKind::nonpositive_value, "mixed zero and nonzero coherence values");
    x.push_back(l);
    y.push_back(v);
  }
  AlphaFit fit;
  fit.alpha = std::max(0.0, log2_slope(x, y));
  for (const auto& [l, v] : samples) fit.A = std::max(fit.A, v * std::exp2(-fit.alpha * l));
  return fit;
}

}  // namespace recon
