#include "recon/quasinorm.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace recon {

std::string_view to_string(QuasinormKind kind) noexcept {
  switch (kind) {
    case QuasinormKind::besov_high_p: return "besov";
    case QuasinormKind::besov_low_p: return "besov-lowp";
    case QuasinormKind::triebel_lizorkin: return "triebel-lizorkin";
  }
  return "?";
}

QuasinormKind parse_quasinorm_kind(std::string_view name) {
  if (name == "besov" || name == "besov-highp") return QuasinormKind::besov_high_p;
  if (name == "besov-lowp") return QuasinormKind::besov_low_p;
  if (name == "triebel-lizorkin" || name == "tl") return QuasinormKind::triebel_lizorkin;
  throw Error(ErrorKind::invalid_spec, "unknown quasinorm kind '" + std::string(name) + "'");
}

void QuasinormSpec::validate() const {
  std::ostringstream msg;
  const bool p_ok = p > 0.0;
  const bool q_ok = q > 0.0;
  if (!p_ok || !q_ok) {
    msg << "quasinorm exponents must be positive (p=" << p << ", q=" << q << ")";
    throw Error(ErrorKind::invalid_spec, msg.str());
  }
  if (dim != 1) throw Error(ErrorKind::invalid_spec, "only d = 1 is supported");
  switch (kind) {
    case QuasinormKind::besov_high_p:
      if (p < 1.0) msg << "besov needs p >= 1 (got " << p << ")";
      else if (!(gamma_or_nu > 0.0)) msg << "besov needs gamma > 0 (got " << gamma_or_nu << ")";
      break;
    case QuasinormKind::besov_low_p:
      if (!(p < 1.0)) msg << "besov-lowp needs p in (0, 1) (got " << p << ")";
      else if (!(gamma_or_nu > dim * (1.0 / p - 1.0))) {
        msg << "besov-lowp needs nu > d(1/p - 1) = " << dim * (1.0 / p - 1.0) << " (got " << gamma_or_nu << ")";
      }
      break;
    case QuasinormKind::triebel_lizorkin:
      if (!(p > 1.0) || std::isinf(p)) msg << "triebel-lizorkin needs p in (1, inf) (got " << p << ")";
      else if (!(q > 1.0)) msg << "triebel-lizorkin needs q in (1, inf] (got " << q << ")";
      else if (!(gamma_or_nu > 0.0)) msg << "triebel-lizorkin needs gamma > 0 (got " << gamma_or_nu << ")";
      break;
  }
  if (!msg.str().empty()) throw Error(ErrorKind::invalid_spec, msg.str());
}

double QuasinormSpec::effective_gamma() const {
  if (kind == QuasinormKind::besov_low_p) return gamma_or_nu - dim * (1.0 / p - 1.0);
  return gamma_or_nu;
}

std::string QuasinormSpec::describe() const {
  std::ostringstream s;
  s << to_string(kind) << "(p=" << p << ", q=" << q << ", "
    << (kind == QuasinormKind::besov_low_p ? "nu=" : "gamma=") << gamma_or_nu << ")";
  return s.str();
}

namespace {

// Accumulates an l^p / L^p quasinorm, with sup for p = inf.
class PowerSum {
 public:
  explicit PowerSum(double p) : p_(p), inf_(std::isinf(p)) {}
  void add(double v, double weight = 1.0) {
    v = std::abs(v);
    if (inf_) {
      max_ = std::max(max_, v);
    } else if (v != 0.0) {
      sum_.add(weight * std::pow(v, p_));
    }
  }
  double value() const { return inf_ ? max_ : std::pow(sum_.value(), 1.0 / p_); }

 private:
  double p_;
  bool inf_;
  double max_ = 0.0;
  CompensatedSum sum_;
};

double ball_max(std::span<const double> values, const DyadicGrid& grid, double x, double radius) {
  const double h = grid.spacing();
  if (radius >= 0.5) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  const double c = (x - std::floor(x)) / h;
  const auto first = static_cast<std::ptrdiff_t>(std::floor(c - radius / h)) - 1;
  const auto last = static_cast<std::ptrdiff_t>(std::ceil(c + radius / h)) + 1;
  double m = 0.0;
  for (std::ptrdiff_t i = first; i <= last; ++i) {
    const double d = std::abs(static_cast<double>(i) - c) * h;
    if (radius + 0.5 * h - d <= 0.0) continue;
    m = std::max(m, std::abs(values[grid.wrap(i)]));
  }
  return m;
}

double besov(const QuasinormSpec& spec, const MultiscaleField& H, bool inner_average) {
  PowerSum outer(spec.q);
  for (int k = H.k_min(); k <= H.k_max(); ++k) {
    const auto slice = H.slice(k);
    const DyadicGrid& lg = H.level_grid(k);
    PowerSum lp(spec.p);
    for (std::size_t j = 0; j < slice.size(); ++j) {
      const double v = inner_average ? ball_average(slice, lg, lg.point(static_cast<std::ptrdiff_t>(j)), std::ldexp(1.0, -k))
                                     : slice[j];
      lp.add(v, H.weight(k));
    }
    outer.add(std::exp2(spec.gamma_or_nu * k) * lp.value());
  }
  return outer.value();
}

double triebel_lizorkin(const QuasinormSpec& spec, const MultiscaleField& H) {
  const bool q_inf = std::isinf(spec.q);
  // |H|^q per level, so the inner average is a plain ball average.
  std::vector<std::vector<double>> powered;
  for (int k = H.k_min(); k <= H.k_max(); ++k) {
    std::vector<double> v(H.slice(k).begin(), H.slice(k).end());
    for (double& e : v) e = q_inf ? std::abs(e) : std::pow(std::abs(e), spec.q);
    powered.push_back(std::move(v));
  }
  int finest = H.k_min();
  for (int k = H.k_min(); k <= H.k_max(); ++k) {
    if (H.level_grid(k).n_max() > H.level_grid(finest).n_max()) finest = k;
  }
  const DyadicGrid& xg = H.level_grid(finest);
  PowerSum lp(spec.p);
  for (std::size_t i = 0; i < xg.size(); ++i) {
    const double x = xg.point(static_cast<std::ptrdiff_t>(i));
    PowerSum lq(spec.q);
    for (int k = H.k_min(); k <= H.k_max(); ++k) {
      const auto& v = powered[static_cast<std::size_t>(k - H.k_min())];
      const double radius = std::ldexp(1.0, -k);
      const double inner = q_inf ? ball_max(v, H.level_grid(k), x, radius)
                                 : std::pow(ball_average(v, H.level_grid(k), x, radius), 1.0 / spec.q);
      lq.add(std::exp2(spec.gamma_or_nu * k) * inner);
    }
    lp.add(lq.value(), xg.spacing());
  }
  return lp.value();
}

}  // namespace

double apply(const QuasinormSpec& spec, const MultiscaleField& H) {
  spec.validate();
  if (!H.all_finite()) throw Error(ErrorKind::invalid_argument, "quasinorm of a non-finite field");
  switch (spec.kind) {
    case QuasinormKind::besov_high_p: return besov(spec, H, false);
    case QuasinormKind::besov_low_p: return besov(spec, H, true);
    case QuasinormKind::triebel_lizorkin: return triebel_lizorkin(spec, H);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

ScalingCheckResult scaling_check(const QuasinormSpec& spec, const MultiscaleField& H, int l,
                                 std::optional<double> gamma_override) {
  spec.validate();
  if (l < 0 || H.k_max() - l < H.k_min()) {
    std::ostringstream msg;
    msg << "scaling check at l=" << l << " needs k_max - l >= k_min";
    throw Error(ErrorKind::invalid_argument, msg.str());
  }
  MultiscaleField left(H.grid(), H.k_min(), H.k_max() - l, H.oversample(), "shifted average");
  for (int k = left.k_min(); k <= left.k_max(); ++k) {
    const auto src = H.slice(k + l);
    const DyadicGrid& sg = H.level_grid(k + l);
    const double radius = std::ldexp(1.0, -k);
    for (std::size_t j = 0; j < left.count(k); ++j) {
      left.at(k, j) = ball_average(src, sg, left.point(k, j), radius);
    }
  }
  ScalingCheckResult res;
  res.l = l;
  res.gamma_effective = gamma_override.value_or(spec.effective_gamma());
  res.lhs = apply(spec, left);
  res.rhs = std::exp2(-l * res.gamma_effective) * apply(spec, H);
  res.ratio = res.rhs > 0.0 ? res.lhs / res.rhs : (res.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return res;
}

}  // namespace recon
