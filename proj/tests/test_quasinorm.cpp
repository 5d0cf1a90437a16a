#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "recon/quasinorm.hpp"

using namespace recon;

namespace {

MultiscaleField random_field(const DyadicGrid& g, int k_min, int k_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MultiscaleField H(g, k_min, k_max);
  for (int k = k_min; k <= k_max; ++k)
    for (double& v : H.mutable_slice(k)) v = u(rng);
  return H;
}

}  // namespace

TEST_CASE("spec validation and parsing") {
  CHECK_NOTHROW(QuasinormSpec{QuasinormKind::besov_high_p, 2, 2, 0.5}.validate());
  CHECK_THROWS_AS((QuasinormSpec{QuasinormKind::besov_high_p, 0.5, 2, 0.5}.validate()), Error);
  CHECK_THROWS_AS((QuasinormSpec{QuasinormKind::besov_low_p, 2, 2, 0.5}.validate()), Error);
  CHECK_THROWS_AS((QuasinormSpec{QuasinormKind::besov_low_p, 0.5, 1, 0.9}.validate()), Error);
  CHECK_THROWS_AS((QuasinormSpec{QuasinormKind::triebel_lizorkin, INFINITY, 2, 0.5}.validate()), Error);
  CHECK_THROWS_AS((QuasinormSpec{QuasinormKind::besov_high_p, 2, 2, -1}.validate()), Error);
  CHECK((QuasinormSpec{QuasinormKind::besov_low_p, 0.5, 1, 1.5}.effective_gamma()) == doctest::Approx(0.5));
  CHECK((QuasinormSpec{QuasinormKind::triebel_lizorkin, 2, 2, 0.7}.effective_gamma()) == doctest::Approx(0.7));
  CHECK(parse_quasinorm_kind("tl") == QuasinormKind::triebel_lizorkin);
  CHECK(parse_quasinorm_kind("besov-lowp") == QuasinormKind::besov_low_p);
  CHECK_THROWS_AS(parse_quasinorm_kind("sobolev"), Error);
}

TEST_CASE("half indicator at one scale") {
  DyadicGrid g(10);
  const int k0 = 3;
  MultiscaleField H(g, k0, k0);
  auto s = H.mutable_slice(k0);
  for (std::size_t j = 0; j < s.size() / 2; ++j) s[j] = 1.0;
  const double gamma = 0.5;
  CHECK(apply({QuasinormKind::besov_high_p, 2, 2, gamma}, H) == doctest::Approx(std::exp2(gamma * k0) * std::sqrt(0.5)));
  CHECK(apply({QuasinormKind::besov_high_p, INFINITY, 2, gamma}, H) == doctest::Approx(std::exp2(gamma * k0)));
}

TEST_CASE("dense brute force agrees") {
  DyadicGrid g(10);
  const MultiscaleField H = random_field(g, 1, 5, 17);
  CHECK(apply({QuasinormKind::besov_high_p, 2, 3, 0.5}, H) == doctest::Approx(oracle::besov(H, 2, 3, 0.5, false)).epsilon(1e-12));
  CHECK(apply({QuasinormKind::besov_high_p, INFINITY, INFINITY, 0.5}, H) ==
        doctest::Approx(oracle::besov(H, INFINITY, INFINITY, 0.5, false)).epsilon(1e-12));
  CHECK(apply({QuasinormKind::besov_low_p, 0.5, 1, 1.5}, H) == doctest::Approx(oracle::besov(H, 0.5, 1, 1.5, true)).epsilon(1e-12));
  CHECK(apply({QuasinormKind::triebel_lizorkin, 2, 2, 0.5}, H) ==
        doctest::Approx(oracle::triebel_lizorkin(H, 2, 2, 0.5)).epsilon(1e-12));
  CHECK(apply({QuasinormKind::triebel_lizorkin, 3, 1.5, 0.3}, H) ==
        doctest::Approx(oracle::triebel_lizorkin(H, 3, 1.5, 0.3)).epsilon(1e-12));
}

TEST_CASE("norm properties") {
  DyadicGrid g(10);
  const MultiscaleField H = random_field(g, 1, 5, 1), G = random_field(g, 1, 5, 2);
  const QuasinormSpec specs[] = {{QuasinormKind::besov_high_p, 2, 2, 0.5},
                                 {QuasinormKind::besov_high_p, INFINITY, 1, 0.5},
                                 {QuasinormKind::triebel_lizorkin, 2, 2, 0.5},
                                 {QuasinormKind::triebel_lizorkin, 2, INFINITY, 0.5},
                                 {QuasinormKind::besov_low_p, 0.5, 1, 1.5}};
  for (const auto& spec : specs) {
    CAPTURE(spec.describe());
    const double nh = apply(spec, H), ng = apply(spec, G), nsum = apply(spec, H + G);
    CHECK(apply(spec, H.scaled(3.0)) == doctest::Approx(3.0 * nh).epsilon(1e-12));
    CHECK(apply(spec, H) == nh);
    // Monotone: H <= H + G pointwise for nonnegative fields.
    CHECK(nsum >= nh);
    if (spec.kind == QuasinormKind::besov_low_p) {
      CHECK(nsum <= std::exp2(1.0 / spec.p - 1.0) * (nh + ng));
    } else {
      CHECK(nsum <= nh + ng + 1e-12);
    }
  }
  CHECK_THROWS_AS(apply({QuasinormKind::besov_high_p, 0.5, 2, 0.5}, H), Error);
}

TEST_CASE("scaling check ratio on random fields") {
  DyadicGrid g(10);
  const MultiscaleField H = random_field(g, 1, 6, 9);
  const QuasinormSpec spec{QuasinormKind::besov_high_p, 2, 2, 0.5};
  for (int l = 0; l <= 3; ++l) {
    const ScalingCheckResult r = scaling_check(spec, H, l);
    CHECK(r.ratio <= C_scaling);
    CHECK(r.ratio == doctest::Approx(r.lhs / r.rhs));
  }
  CHECK_THROWS_AS(scaling_check(spec, H, 6), Error);
}
