#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "recon/germ.hpp"
#include "recon/mollifier.hpp"

using namespace recon;

namespace {

SampledFunction test_bump(const DyadicGrid& g) {
  return SampledFunction::from_centered(
      g, [](double y) { return std::abs(y) < 0.25 ? std::pow(1.0 - 16.0 * y * y, 3) : 0.0; }, 0.25);
}

// h * sum_y P(y) xi(y - c), with P the order-m Taylor polynomial of sin(2 pi .) at x.
double taylor_oracle(double x, int m, const SampledFunction& xi, double c) {
  const DyadicGrid& g = xi.grid();
  const double w = 2 * oracle::pi;
  long double s = 0.0L;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = lift(c - x) + lift(g.point(static_cast<std::ptrdiff_t>(i)));
    double p = 0.0, fact = 1.0, dp = 1.0;
    for (int j = 0; j <= m; ++j) {
      if (j > 0) {
        fact *= j;
        dp *= d;
      }
      p += std::pow(w, j) * std::sin(w * x + j * oracle::pi / 2) / fact * dp;
    }
    s += p * xi[i];
  }
  return static_cast<double>(s * g.spacing());
}

}  // namespace

TEST_CASE("constant germ integrates against w") {
  DyadicGrid g(9);
  const auto w = SampledFunction::from_periodic(g, [](double x) { return std::cos(2 * oracle::pi * x); });
  const GermPtr F = constant_germ(w);
  const SampledFunction xi = test_bump(g);
  CHECK(F->base_point_independent());
  long double s = 0.0L;
  for (std::size_t i = 0; i < g.size(); ++i) s += w[i] * xi[i];
  const double ref = static_cast<double>(s * g.spacing());
  CHECK(F->evaluate(0.1, xi) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(F->evaluate(0.7, xi) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("taylor germ matches the polynomial sum") {
  DyadicGrid g(10);
  const SampledFunction xi = test_bump(g);
  const Kernel k = Kernel::from_sampled(xi);
  for (int m = 0; m <= 3; ++m) {
    const GermPtr F = taylor_germ(SmoothFunction::sine(), m);
    for (double x : {0.0, 0.3, 0.9}) {
      for (std::ptrdiff_t c : {0, 100, 1000}) {
        CHECK(F->evaluate(x, k, c) == doctest::Approx(taylor_oracle(x, m, xi, g.point(c))).epsilon(1e-10));
      }
    }
  }
  CHECK_THROWS_AS(taylor_germ(SmoothFunction::sine(), 4), Error);
}

TEST_CASE("smooth function derivatives") {
  const SmoothFunction s = SmoothFunction::sine(2.0, 3.0);
  const double x = 0.17, w = 4 * oracle::pi;
  CHECK(s(x) == doctest::Approx(3 * std::sin(w * x)));
  CHECK(s.derivative(x, 1) == doctest::Approx(3 * w * std::cos(w * x)));
  CHECK(s.derivative(x, 2) == doctest::Approx(-3 * w * w * std::sin(w * x)));
}

TEST_CASE("sewing germ routes agree") {
  DyadicGrid g(11);
  const Kernel k = Kernel::from_sampled(test_bump(g));
  const auto A = TwoParamProcess::young(SmoothFunction::cosine(), SmoothFunction::sine());
  const auto F = sewing_germ(A, {true, 1e-6});
  for (double x : {0.0, 0.4}) {
    for (std::ptrdiff_t c : {0, 700}) {
      const double d = F->evaluate_by_derivative(x, k, c);
      CHECK(F->evaluate_by_parts(x, k, c) == doctest::Approx(d).epsilon(1e-6).scale(1.0));
      CHECK_NOTHROW(F->evaluate_checked(x, k, c));
    }
  }
}

TEST_CASE("young process partial derivative") {
  const auto A = TwoParamProcess::young(SmoothFunction::cosine(), SmoothFunction::sine());
  const double s = 0.2, t = 0.35, w = 2 * oracle::pi;
  CHECK(A.value(s, t) == doctest::Approx(std::cos(w * s) * (std::sin(w * t) - std::sin(w * s))));
  CHECK(A.d2(s, t) == doctest::Approx(std::cos(w * s) * w * std::cos(w * t)));
  const auto L = TwoParamProcess::linear();
  CHECK(L.d2(0.1, 0.4) == doctest::Approx(1.0));
}

TEST_CASE("combine and translate") {
  DyadicGrid g(9);
  const Kernel k = Kernel::from_sampled(test_bump(g));
  const GermPtr a = taylor_germ(SmoothFunction::sine(), 1);
  const GermPtr b = taylor_germ(SmoothFunction::cosine(), 2);
  const GermPtr c = combine(2.0, a, -0.5, b);
  CHECK(c->evaluate(0.3, k, 40) ==
        doctest::Approx(2.0 * a->evaluate(0.3, k, 40) - 0.5 * b->evaluate(0.3, k, 40)).epsilon(1e-13));
  const GermPtr t = translate(a, 16);
  CHECK(t->evaluate(g.point(100), k, 100) == doctest::Approx(a->evaluate(g.point(84), k, 84)).epsilon(1e-13));
}

TEST_CASE("incoherent germ") {
  DyadicGrid g(10);
  const Kernel k = Kernel::from_sampled(test_bump(g));
  const GermPtr plus = incoherent_germ(g, 0);
  CHECK(plus->evaluate(0.3, k, 5) == doctest::Approx(k.mass()));
  const GermPtr f = incoherent_germ(g, 7);
  const double v = f->evaluate(0.3, k, 5);
  CHECK(std::abs(std::abs(v) - k.mass()) < 1e-14);
  CHECK(f->evaluate(0.3, k, 5) == incoherent_germ(g, 7)->evaluate(0.3, k, 5));
  // Constant on blocks of width 2^-5.
  CHECK(f->evaluate(0.3125, k, 5) == f->evaluate(0.3125 + 0.03, k, 5));
  int flips = 0;
  for (int b = 0; b < 32; ++b) flips += f->evaluate(b / 32.0, k, 0) != f->evaluate((b + 1) / 32.0, k, 0);
  CHECK(flips > 4);
}
