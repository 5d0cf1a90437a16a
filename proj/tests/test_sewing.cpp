#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "recon/sewing.hpp"

using namespace recon;

namespace {

double sup_diff(const SewnPath& a, const SewnPath& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.g.size(); ++i) e = std::max(e, std::abs(a.g[i] - b.g[i]));
  return e;
}

}  // namespace

TEST_CASE("exact increments are recovered") {
  DyadicGrid g(11);
  const MollifierStack st = MollifierStack::build(g, 2.5);
  const SmoothFunction w = SmoothFunction::sine(1.0, 1.0, 0.3);
  const TwoParamProcess A = TwoParamProcess::increment(w);
  for (SewRoute route : {SewRoute::reconstruction, SewRoute::diagonal_oracle}) {
    const SewnPath p = sew(A, st, {}, route);
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(p.g[i] - (w(g.point(i)) - w(0.0))));
    CHECK(e <= 1e-8);
    CHECK(std::abs(p.drift) <= 1e-8);
  }
}

TEST_CASE("young fixture: oracle and route agreement") {
  DyadicGrid g(11);
  const MollifierStack st = MollifierStack::build(g, 2.5);
  const SmoothFunction f = SmoothFunction::cosine(), g0 = SmoothFunction::sine();
  const TwoParamProcess A = TwoParamProcess::young(f, g0);
  const SewnPath rec = sew(A, st);
  const SewnPath orc = sew(A, st, {}, SewRoute::diagonal_oracle);
  CHECK(sup_diff(rec, orc) <= 1e-5);
  const std::vector<double> rs = riemann_stieltjes(f, g0, 11);
  double e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(rec.g[i] - rs[i]));
  CHECK(e <= 1e-4);
  // int_0^1 cos d(sin) over one period is pi.
  CHECK(rs.back() == doctest::Approx(oracle::pi).epsilon(1e-5));
  CHECK(rec.value(1.0) == doctest::Approx(oracle::pi).epsilon(1e-5));
}

TEST_CASE("sew is linear") {
  DyadicGrid g(10);
  const MollifierStack st = MollifierStack::build(g, 2.5);
  const TwoParamProcess A = TwoParamProcess::young(SmoothFunction::cosine(), SmoothFunction::sine());
  const TwoParamProcess B = TwoParamProcess::increment(SmoothFunction::cosine(2.0));
  const SewnPath lhs = sew(TwoParamProcess::combination(2.0, A, -0.5, B), st);
  const SewnPath a = sew(A, st), b = sew(B, st);
  double e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(lhs.g[i] - (2.0 * a.g[i] - 0.5 * b.g[i])));
  CHECK(e <= 1e-8);
}

TEST_CASE("cocycle identities") {
  DyadicGrid g(10);
  const MollifierStack st = MollifierStack::build(g, 2.5);
  const SmoothFunction f = SmoothFunction::cosine(), g0 = SmoothFunction::sine();
  const TwoParamProcess A = TwoParamProcess::young(f, g0);
  const SewnPath path = sew(A, st);
  const TwoParam dg = [&](double s, double t) { return delta1(path, s, t); };
  const TwoParam rem = [&](double s, double t) { return delta1(path, s, t) - A.value(s, t); };
  const TwoParam anti = antisymmetrize(A.value);
  const ThreeParam d_anti = delta2_process(anti);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> idx(-2000, 2000);
  for (int trial = 0; trial < 50; ++trial) {
    const double s = idx(rng) * g.spacing(), u = idx(rng) * g.spacing(), t = idx(rng) * g.spacing();
    CHECK(std::abs(delta2(dg, s, u, t)) <= 1e-13);
    CHECK(delta2(rem, s, u, t) == doctest::Approx(-delta2(A.value, s, u, t)).epsilon(1e-12).scale(1.0));
    const double young = (f(s) - f(u)) * (g0(t) - g0(u));
    CHECK(delta2(A.value, s, u, t) == doctest::Approx(young).epsilon(1e-12).scale(1.0));
    const double v = d_anti(s, u, t);
    CHECK(d_anti(t, u, s) == doctest::Approx(-v).epsilon(1e-12).scale(1.0));
    CHECK(d_anti(u, s, t) == doctest::Approx(-v).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("b_norm of the linear process is a geometric sum") {
  DyadicGrid g(10);
  const TwoParam A = [](double s, double t) { return t - s; };
  // 2^{1.5 k} 2^{-k} over k = 1..8, in l^2.
  CHECK(b_norm(A, g, 1.5, 2.0, 2.0, 1, 8) == doctest::Approx(std::sqrt(510.0)).epsilon(1e-12));
  CHECK(b_norm(A, g, 1.5, 2.0, INFINITY, 1, 8) == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("sampled norms agree with dense evaluation") {
  DyadicGrid g(9);
  const TwoParamProcess A = TwoParamProcess::young(SmoothFunction::cosine(), SmoothFunction::sine(3.0));
  NormOptions dense;
  dense.offsets_per_radius = 0;
  dense.x_level = 0;
  const double b = b_norm(A.value, g, 1.5, 2.0, 2.0, 1, 6);
  const double bd = b_norm(A.value, g, 1.5, 2.0, 2.0, 1, 6, dense);
  CHECK(b <= bd * (1 + 1e-12));
  CHECK(b >= 0.99 * bd);
  const ThreeParam dA = delta2_process(A.value);
  const double c = bbar_norm(dA, g, 1.5, 2.0, 2.0, 3, 6);
  const double cd = bbar_norm(dA, g, 1.5, 2.0, 2.0, 3, 6, dense);
  CHECK(c <= cd * (1 + 1e-12));
  CHECK(c >= 0.99 * cd);
  NormOptions serial;
  serial.exec = Exec::serial;
  CHECK(bbar_norm(dA, g, 1.5, 2.0, 2.0, 3, 6, serial) == c);
}

TEST_CASE("sewing bound on the young fixture") {
  DyadicGrid g(10);
  const MollifierStack st = MollifierStack::build(g, 2.5);
  const TwoParamProcess A = TwoParamProcess::young(SmoothFunction::cosine(), SmoothFunction::sine());
  const SewingBoundReport rep = sewing_bound(A, sew(A, st), 1.5, 2.0, INFINITY, 1, 6);
  CHECK(rep.pass);
  CHECK(rep.remainder_norm <= C_sew * rep.delta_norm);
}

TEST_CASE("sewing preconditions") {
  DyadicGrid g(10);
  const MollifierStack st = MollifierStack::build(g, 2.5);
  const TwoParamProcess A = TwoParamProcess::linear();
  SewOptions bad_eta;
  bad_eta.eta = 1.0;
  SewOptions bad_p;
  bad_p.p = 0.5;
  try {
    sew(A, st, bad_eta);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::hypothesis_violated);
  }
  CHECK_THROWS_AS(sew(A, st, bad_p), Error);
}

TEST_CASE("chi partition") {
  CHECK(chi_tilde(0.5) == doctest::Approx(0.5));
  CHECK(chi_tilde(0.7) == 0.0);
  CHECK(chi_tilde(0.3) == 1.0);
  for (double t : {0.1, 0.45, 0.52, 0.59}) CHECK(chi_tilde(t) + chi_tilde(1.0 - t) == doctest::Approx(1.0));
  const ChiPartitionReport rep = chi_partition_check(DyadicGrid(10));
  CHECK(rep.samples == 1023);
  CHECK(rep.max_residual <= 1e-10);
  CHECK(rep.support_lo >= 0.2);
  CHECK(rep.support_hi <= 0.6);
}
