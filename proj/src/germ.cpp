#include "recon/germ.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace recon {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

SmoothFunction SmoothFunction::sine(double freq, double amplitude, double phase) {
  std::ostringstream name;
  name << "sin(2pi*" << freq << "x)";
  return {name.str(), [=](double x, int j) {
            const double w = two_pi * freq;
            // d^j/dx^j sin(wx + p) = w^j sin(wx + p + j pi/2)
            return amplitude * std::pow(w, j) * std::sin(w * x + phase + j * std::numbers::pi / 2.0);
          }};
}

SmoothFunction SmoothFunction::cosine(double freq, double amplitude) {
  std::ostringstream name;
  name << "cos(2pi*" << freq << "x)";
  return {name.str(), [=](double x, int j) {
            const double w = two_pi * freq;
            return amplitude * std::pow(w, j) * std::cos(w * x + j * std::numbers::pi / 2.0);
          }};
}

double TwoParamProcess::d2(double s, double t) const {
  if (partial_2) return partial_2(s, t);
  return (value(s, t + fd_step) - value(s, t - fd_step)) / (2.0 * fd_step);
}

TwoParamProcess TwoParamProcess::linear() {
  return {"linear", [](double s, double t) { return t - s; }, [](double, double) { return 1.0; }};
}

TwoParamProcess TwoParamProcess::square() {
  return {"square", [](double s, double t) { return (t - s) * (t - s); },
          [](double s, double t) { return 2.0 * (t - s); }};
}

TwoParamProcess TwoParamProcess::increment(const SmoothFunction& w) {
  return {"increment:" + w.name, [w](double s, double t) { return w(t) - w(s); },
          [w](double, double t) { return w.derivative(t, 1); }};
}

TwoParamProcess TwoParamProcess::young(const SmoothFunction& f, const SmoothFunction& g) {
  return {"young:" + f.name + ":" + g.name, [f, g](double s, double t) { return f(s) * (g(t) - g(s)); },
          [f, g](double s, double t) { return f(s) * g.derivative(t, 1); }};
}

TwoParamProcess TwoParamProcess::combination(double a, const TwoParamProcess& A, double b,
                                             const TwoParamProcess& B) {
  return {"combination",
          [=](double s, double t) { return a * A.value(s, t) + b * B.value(s, t); },
          [=](double s, double t) { return a * A.d2(s, t) + b * B.d2(s, t); }};
}

double Germ::evaluate(double x, const SampledFunction& test) const {
  return evaluate(x, Kernel::from_sampled(test), 0);
}

// ---------------------------------------------------------------------------

namespace {

class ConstantGerm final : public Germ {
 public:
  explicit ConstantGerm(SampledFunction w) : w_(std::move(w)) {}

  double evaluate(double, const Kernel& test, std::ptrdiff_t center) const override {
    if (!(test.grid() == w_.grid())) throw Error(ErrorKind::grid_mismatch, "test and germ live on different grids");
    const DyadicGrid& g = w_.grid();
    CompensatedSum s;
    const auto taps = test.taps();
    for (std::ptrdiff_t j = test.lo(); j <= test.hi(); ++j) {
      s.add(w_[g.wrap(center + j)] * taps[static_cast<std::size_t>(j - test.lo())]);
    }
    return g.spacing() * s.value();
  }
  std::string_view kind() const noexcept override { return "constant"; }
  bool base_point_independent() const noexcept override { return true; }

 private:
  SampledFunction w_;
};

class TaylorGerm final : public Germ {
 public:
  TaylorGerm(SmoothFunction f, int order) : f_(std::move(f)), order_(order) {
    if (order < 0 || order > 3) throw Error(ErrorKind::invalid_argument, "Taylor germ order must lie in [0, 3]");
  }

  double evaluate(double x, const Kernel& test, std::ptrdiff_t center) const override {
    std::array<double, 4> coef{};
    double fact = 1.0;
    for (int j = 0; j <= order_; ++j) {
      if (j > 0) fact *= j;
      coef[static_cast<std::size_t>(j)] = f_.derivative(x, j) / fact;
    }
    const DyadicGrid& g = test.grid();
    const double h = g.spacing();
    const auto taps = test.taps();
    // Offsets are exact multiples of h from the centre; only the lift of
    // the base separation needs the torus.
    const double d0 = lift(g.point(center) - x) + static_cast<double>(test.lo()) * h;
    CompensatedSum s;
    for (std::size_t i = 0; i < taps.size(); ++i) {
      const double d = d0 + static_cast<double>(i) * h;
      double p = coef[static_cast<std::size_t>(order_)];
      for (int j = order_ - 1; j >= 0; --j) p = p * d + coef[static_cast<std::size_t>(j)];
      s.add(p * taps[i]);
    }
    return h * s.value();
  }
  std::string_view kind() const noexcept override { return "taylor"; }
  std::optional<RegularityHint> regularity_hint() const noexcept override {
    return RegularityHint{0.0, static_cast<double>(order_ + 1)};
  }

 private:
  SmoothFunction f_;
  int order_;
};

// splitmix64 finaliser: a stateless hash so the sign field is reproducible
// across platforms and independent of evaluation order.
std::uint64_t mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class IncoherentGerm final : public Germ {
 public:
  IncoherentGerm(const DyadicGrid& grid, std::uint64_t seed)
      : grid_(grid), seed_(seed), block_level_(grid.n_max() / 2) {}

  double sign(double x) const noexcept {
    if (seed_ == 0) return 1.0;
    const double t = x - std::floor(x);
    const auto block = static_cast<std::uint64_t>(std::floor(std::ldexp(t, block_level_)));
    return (mix(seed_ ^ mix(block)) & 1ULL) != 0 ? 1.0 : -1.0;
  }

  double evaluate(double x, const Kernel& test, std::ptrdiff_t) const override {
    return sign(x) * test.mass();
  }
  std::string_view kind() const noexcept override { return "incoherent"; }
  bool base_point_independent() const noexcept override { return seed_ == 0; }

 private:
  DyadicGrid grid_;
  std::uint64_t seed_;
  int block_level_;
};

class CombinedGerm final : public Germ {
 public:
  CombinedGerm(double a, GermPtr f, double b, GermPtr g) : a_(a), b_(b), f_(std::move(f)), g_(std::move(g)) {}

  double evaluate(double x, const Kernel& test, std::ptrdiff_t center) const override {
    return a_ * f_->evaluate(x, test, center) + b_ * g_->evaluate(x, test, center);
  }
  std::string_view kind() const noexcept override { return "combination"; }
  bool base_point_independent() const noexcept override {
    return f_->base_point_independent() && g_->base_point_independent();
  }

 private:
  double a_;
  double b_;
  GermPtr f_;
  GermPtr g_;
};

class TranslatedGerm final : public Germ {
 public:
  TranslatedGerm(GermPtr f, std::ptrdiff_t shift) : f_(std::move(f)), shift_(shift) {}

  double evaluate(double x, const Kernel& test, std::ptrdiff_t center) const override {
    const double tau = static_cast<double>(shift_) * test.grid().spacing();
    return f_->evaluate(x - tau, test, center - shift_);
  }
  std::string_view kind() const noexcept override { return "translated"; }
  bool base_point_independent() const noexcept override { return f_->base_point_independent(); }

 private:
  GermPtr f_;
  std::ptrdiff_t shift_;
};

}  // namespace

GermPtr constant_germ(SampledFunction w) { return std::make_shared<ConstantGerm>(std::move(w)); }

GermPtr taylor_germ(SmoothFunction f, int order) { return std::make_shared<TaylorGerm>(std::move(f), order); }

GermPtr incoherent_germ(const DyadicGrid& grid, std::uint64_t seed) {
  return std::make_shared<IncoherentGerm>(grid, seed);
}

GermPtr combine(double a, GermPtr f, double b, GermPtr g) {
  return std::make_shared<CombinedGerm>(a, std::move(f), b, std::move(g));
}

GermPtr translate(GermPtr f, std::ptrdiff_t shift) { return std::make_shared<TranslatedGerm>(std::move(f), shift); }

// ---------------------------------------------------------------------------

SewingGerm::SewingGerm(TwoParamProcess process, SewingGermOptions opts)
    : process_(std::move(process)), opts_(opts) {
  if (!process_.value) throw Error(ErrorKind::invalid_argument, "sewing germ needs A(s, t)");
}

double SewingGerm::evaluate(double x, const Kernel& test, std::ptrdiff_t center) const {
  return opts_.cross_check ? evaluate_checked(x, test, center) : evaluate_by_derivative(x, test, center);
}

double SewingGerm::evaluate_by_derivative(double x, const Kernel& test, std::ptrdiff_t center) const {
  const DyadicGrid& g = test.grid();
  const double h = g.spacing();
  const double d0 = lift(g.point(center) - x) + static_cast<double>(test.lo()) * h;
  const auto taps = test.taps();
  CompensatedSum s;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    if (taps[i] == 0.0) continue;
    s.add(process_.d2(x, x + d0 + static_cast<double>(i) * h) * taps[i]);
  }
  return h * s.value();
}

double SewingGerm::evaluate_by_parts(double x, const Kernel& test, std::ptrdiff_t center) const {
  const DyadicGrid& g = test.grid();
  const double h = g.spacing();
  const double d0 = lift(g.point(center) - x) + static_cast<double>(test.lo()) * h;
  CompensatedSum s;
  for (std::ptrdiff_t j = test.lo() - 2; j <= test.hi() + 2; ++j) {
    const double dxi = (-test.at(j + 2) + 8.0 * test.at(j + 1) - 8.0 * test.at(j - 1) + test.at(j - 2)) / (12.0 * h);
    if (dxi == 0.0) continue;
    s.add(process_.value(x, x + d0 + static_cast<double>(j - test.lo()) * h) * dxi);
  }
  return -h * s.value();
}

double SewingGerm::evaluate_checked(double x, const Kernel& test, std::ptrdiff_t center) const {
  const double a = evaluate_by_derivative(x, test, center);
  const double b = evaluate_by_parts(x, test, center);
  if (std::abs(a - b) > opts_.tolerance) {
    std::ostringstream msg;
    msg << "sewing germ routes disagree at x=" << x << ": derivative " << a << " vs by-parts " << b;
    throw Error(ErrorKind::route_disagreement, msg.str());
  }
  return a;
}

std::shared_ptr<const SewingGerm> sewing_germ(TwoParamProcess process, SewingGermOptions opts) {
  return std::make_shared<SewingGerm>(std::move(process), opts);
}

}  // namespace recon
