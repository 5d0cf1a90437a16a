#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "recon/grid.hpp"

using namespace recon;

TEST_CASE("grid geometry") {
  DyadicGrid g(8);
  CHECK(g.size() == 256);
  CHECK(g.spacing() == doctest::Approx(1.0 / 256));
  CHECK(g.wrap(-1) == 255);
  CHECK(g.wrap(256) == 0);
  CHECK(g.lifted_index(255) == -1);
  CHECK(g.lifted_index(128) == 128);
  CHECK(g.on_grid(3.0 / 256));
  CHECK_FALSE(g.on_grid(0.5 / 256));
  CHECK(lift(0.75) == doctest::Approx(-0.25));
  CHECK(torus_distance(0.05, 0.95) == doctest::Approx(0.1));
  CHECK_THROWS_AS(DyadicGrid(3), Error);
}

TEST_CASE("convolve matches the direct sum") {
  DyadicGrid g(8);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  std::vector<double> a(g.size()), b(g.size());
  for (auto& v : a) v = n01(rng);
  for (auto& v : b) v = n01(rng);
  const SampledFunction fa(g, a), fb(g, b);
  const SampledFunction c = convolve(fa, fb);
  const std::vector<double> ref = oracle::direct_convolution(a, b, g.spacing());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(c[i] == doctest::Approx(ref[i]).epsilon(1e-10).scale(1.0));
}

TEST_CASE("quadrature of trigonometric samples") {
  DyadicGrid g(10);
  const auto s = SampledFunction::from_periodic(g, [](double x) { return std::sin(2 * oracle::pi * x); });
  const auto one = SampledFunction::from_periodic(g, [](double) { return 1.0; });
  CHECK(std::abs(quadrature(s)) < 1e-14);
  CHECK(quadrature(one) == doctest::Approx(1.0));
}

TEST_CASE("ball_average uses cell overlap weights") {
  DyadicGrid g(9);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(g.size());
  for (auto& e : v) e = u(rng);
  const SampledFunction f(g, v);
  for (double radius : {2.0 / 512, 2.6 / 512, 0.01, 0.1, 0.3333, 0.49, 0.6}) {
    for (double x : {0.0, 0.25, 1.0 - 1.0 / 512, 0.123}) {
      CHECK(ball_average(f, x, radius) == doctest::Approx(oracle::overlap_average(v, x, radius)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(ball_average(f, 0.0, 1.0 / 512), Error);
}

TEST_CASE("ball_average of a constant is the constant") {
  DyadicGrid g(7);
  const auto c = SampledFunction::from_periodic(g, [](double) { return 2.5; });
  CHECK(ball_average(c, 0.3, 0.05) == doctest::Approx(2.5));
}

TEST_CASE("dilation keeps unit quadrature and narrows support") {
  DyadicGrid g(10);
  const auto tent = SampledFunction::from_centered(
      g, [](double y) { return std::max(0.0, 1.0 - 4.0 * std::abs(y)) * 4.0; }, 0.25);
  CHECK(quadrature(tent) == doctest::Approx(1.0).epsilon(1e-6));
  for (int k = 0; k <= 4; ++k) {
    const Kernel kk = dilate_kernel(tent, k);
    CHECK(kk.mass() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(kk.radius() <= std::ldexp(0.25, -k) + g.spacing());
  }
  const SampledFunction moved = dilate_translate(tent, 2, 0.5);
  CHECK(moved[512] == doctest::Approx(16.0));
}

TEST_CASE("holder seminorm against brute force") {
  DyadicGrid g(8);
  const double a = 0.2;
  const auto tent = SampledFunction::from_centered(
      g, [a](double y) { return std::max(0.0, 1.0 - std::abs(y) / a); }, a);
  const double h = g.spacing();
  double ref = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const double d = std::abs(static_cast<double>(g.lifted_index(i) - g.lifted_index(j))) * h;
      ref = std::max(ref, std::abs(tent[i] - tent[j]) / std::sqrt(d));
    }
  CHECK(holder_seminorm(tent, 0.5) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(holder_seminorm(tent.scaled(3.0), 0.5) == doctest::Approx(3.0 * ref).epsilon(1e-12));
}

TEST_CASE("holder seminorm: serial and parallel agree") {
  DyadicGrid g(10);
  const auto bump = SampledFunction::from_centered(
      g, [](double y) { return std::abs(y) < 0.3 ? std::exp(-1.0 / (1.0 - y * y / 0.09)) : 0.0; }, 0.3);
  for (double r : {0.5, 1.5, 2.5}) CHECK(holder_seminorm(bump, r, Exec::serial) == holder_seminorm(bump, r, Exec::parallel));
}
