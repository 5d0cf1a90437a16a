#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "recon/grid.hpp"

namespace recon {

/// A smooth periodic function known together with its derivatives.
struct SmoothFunction {
  std::string name;
  /// derivative(x, j) returns the j-th derivative at x (j = 0 is the value).
  std::function<double(double, int)> derivative;

  double operator()(double x) const { return derivative(x, 0); }

  /// x -> amplitude * sin(2 pi freq x + phase).
  static SmoothFunction sine(double freq = 1.0, double amplitude = 1.0, double phase = 0.0);
  /// x -> amplitude * cos(2 pi freq x).
  static SmoothFunction cosine(double freq = 1.0, double amplitude = 1.0);
};

/// A two-parameter process A(s, t) with its derivative in the second slot.
struct TwoParamProcess {
  std::string name;
  std::function<double(double, double)> value;
  /// D_2 A(s, t). Empty means: central difference of `value` with step fd_step.
  std::function<double(double, double)> partial_2;
  double fd_step = 1e-5;

  double d2(double s, double t) const;

  /// A(s, t) = t - s.
  static TwoParamProcess linear();
  /// A(s, t) = (t - s)^2.
  static TwoParamProcess square();
  /// A(s, t) = w(t) - w(s).
  static TwoParamProcess increment(const SmoothFunction& w);
  /// A(s, t) = f(s) (g(t) - g(s)).
  static TwoParamProcess young(const SmoothFunction& f, const SmoothFunction& g);
  /// a A + b B.
  static TwoParamProcess combination(double a, const TwoParamProcess& A, double b, const TwoParamProcess& B);
};

struct RegularityHint {
  double alpha;
  double gamma;
};

/// A family x -> F_x of distributions, known only through its action on
/// compactly supported sampled tests.
///
/// evaluate(x, test, c) returns F_x applied to the translate of `test`
/// centred at grid index c. Implementations are pure and safe to call
/// concurrently.
class Germ {
 public:
  virtual ~Germ() = default;

  virtual double evaluate(double x, const Kernel& test, std::ptrdiff_t center) const = 0;
  virtual std::string_view kind() const noexcept = 0;

  /// True when F_x does not depend on x; every difference F_y - F_x vanishes.
  virtual bool base_point_independent() const noexcept { return false; }
  virtual std::optional<RegularityHint> regularity_hint() const noexcept { return std::nullopt; }

  /// F_x applied to a centred sampled test (placed at the origin).
  double evaluate(double x, const SampledFunction& test) const;
};

using GermPtr = std::shared_ptr<const Germ>;

/// F_x(xi) = int w xi, for every x.
GermPtr constant_germ(SampledFunction w);

/// F_x = order-m Taylor polynomial of f at x (0 <= m <= 3).
GermPtr taylor_germ(SmoothFunction f, int order);

struct SewingGermOptions {
  /// Compare both evaluation routes on every call and throw on disagreement.
  bool cross_check = false;
  double tolerance = 1e-6;
};

/// F_x = D_2 A(x, .), the germ behind sewing.
class SewingGerm final : public Germ {
 public:
  SewingGerm(TwoParamProcess process, SewingGermOptions opts = {});

  double evaluate(double x, const Kernel& test, std::ptrdiff_t center) const override;
  std::string_view kind() const noexcept override { return "sewing"; }

  /// int D_2 A(x, y) xi(y) dy by quadrature.
  double evaluate_by_derivative(double x, const Kernel& test, std::ptrdiff_t center) const;
  /// -int A(x, y) xi'(y) dy with a fourth-order centred difference of xi.
  double evaluate_by_parts(double x, const Kernel& test, std::ptrdiff_t center) const;
  /// Both routes; throws route_disagreement beyond the tolerance.
  double evaluate_checked(double x, const Kernel& test, std::ptrdiff_t center) const;

  const TwoParamProcess& process() const noexcept { return process_; }

 private:
  TwoParamProcess process_;
  SewingGermOptions opts_;
};

std::shared_ptr<const SewingGerm> sewing_germ(TwoParamProcess process, SewingGermOptions opts = {});

/// F_x(xi) = s(x) int xi with s a pseudo-random +-1 step function on blocks
/// of width 2^{-floor(n_max / 2)}. Seed 0 gives s = +1 everywhere.
GermPtr incoherent_germ(const DyadicGrid& grid, std::uint64_t seed);

/// a F + b G.
GermPtr combine(double a, GermPtr f, double b, GermPtr g);

/// x -> F_{x - tau}(xi(. + tau)), tau = shift grid cells.
GermPtr translate(GermPtr f, std::ptrdiff_t shift);

}  // namespace recon
