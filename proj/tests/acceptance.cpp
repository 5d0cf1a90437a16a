// Acceptance run: one PASS/FAIL line per criterion A1..A10.
//
// Exit status is 0 when every criterion passes except those named with
// --expect-fail, and those do fail. Anything else exits 1.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "recon/coherence.hpp"
#include "recon/mollifier.hpp"
#include "recon/quasinorm.hpp"
#include "recon/reconstruct.hpp"
#include "recon/sewing.hpp"

using namespace recon;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

SampledFunction sine_samples(const DyadicGrid& g) {
  return SampledFunction::from_periodic(g, [](double x) { return std::sin(2.0 * std::numbers::pi * x); });
}

Outcome a1() {
  DyadicGrid g(12);
  double worst_moment = 0.0, worst_mass = 0.0;
  for (BumpKind kind : {BumpKind::exponential, BumpKind::polynomial}) {
    const SampledFunction phi0 = base_bump(g, kind);
    for (int rt = 0; rt <= 3; ++rt) {
      const MomentCancellation mc = moment_cancel(phi0, rt);
      worst_mass = std::max(worst_mass, std::abs(moment(mc.phi, 0) - 1.0));
      for (int a = 1; a <= rt; ++a) worst_moment = std::max(worst_moment, std::abs(moment(mc.phi, a)));
    }
  }
  const bool ok = worst_moment <= 1e-8 && worst_mass <= 1e-10;
  return {ok, "max|moment| " + fmt("%.2e", worst_moment) + ", max|mass-1| " + fmt("%.2e", worst_mass)};
}

Outcome a2() {
  // Discrete route at relative 1e-8 for every n; resampled route non-increasing in n_max at each fixed n.
  std::map<int, std::vector<double>> resampled;
  double worst = 0.0;
  for (int nm : {10, 12, 14}) {
    DyadicGrid g(nm);
    const MollifierStack st = MollifierStack::build(g, 1.5);
    for (int n = 0; n <= nm - 6; ++n) {
      worst = std::max(worst, check_telescope_identity(st, n));
      if (n <= 4) resampled[n].push_back(check_telescope_identity(st, n, {TelescopeRoute::resampled, false}));
    }
  }
  // Below 1e-14 both sides are round-off and count as equal.
  constexpr double floor = 1e-14;
  bool monotone = true;
  for (const auto& [n, seq] : resampled)
    for (std::size_t i = 1; i < seq.size(); ++i) monotone = monotone && (seq[i] <= seq[i - 1] || seq[i] <= floor);
  std::ostringstream d;
  d << "discrete worst " << fmt("%.2e", worst) << "; resampled n=4 over n_max 10/12/14: " << fmt("%.2e", resampled[4][0])
    << " " << fmt("%.2e", resampled[4][1]) << " " << fmt("%.2e", resampled[4][2]);
  return {worst <= 1e-8 && monotone, d.str()};
}

Outcome a3() {
  DyadicGrid g(14);
  const MollifierStack st = MollifierStack::build(g, 1.5);
  const SampledFunction w = sine_samples(g);
  const GermPtr germ = constant_germ(w);
  const int n_stop = default_n_stop(g);
  std::vector<double> err;
  for (int n = 4; n <= n_stop; ++n) err.push_back((f_n_field(*germ, st, n) - w).sup_norm());
  double worst_ratio = 0.0;
  for (std::size_t i = 1; i < err.size(); ++i) worst_ratio = std::max(worst_ratio, err[i] / err[i - 1]);
  const double final_err = (reconstruct(*germ, st, n_stop).f - w).sup_norm();
  const bool ok = worst_ratio <= std::exp2(-1.8) && final_err <= 1e-6;
  return {ok, "worst level ratio " + fmt("%.4f", worst_ratio) + " (limit " + fmt("%.4f", std::exp2(-1.8)) +
                  "), final error " + fmt("%.3e", final_err)};
}

Outcome a4() {
  DyadicGrid g(13);
  const double r = 2.5;
  const MollifierStack st = MollifierStack::build(g, r);
  const SampledFunction w = sine_samples(g);
  const TestClassDictionary dict = standard_dictionary(st, r);
  bool ok = true;
  std::ostringstream d;
  for (int m : {0, 1, 2}) {
    const GermPtr germ = taylor_germ(SmoothFunction::sine(), m);
    const Reconstruction rec = reconstruct(*germ, st, 9);
    const double err = (rec.f - w).sup_norm();
    const MultiscaleField delta = error_field(rec, *germ, dict, 3, 7);
    std::vector<double> ks, sups;
    for (int k = 3; k <= 7; ++k) {
      const auto s = delta.slice(k);
      ks.push_back(k);
      sups.push_back(*std::max_element(s.begin(), s.end()));
    }
    const double slope = -log2_slope(ks, sups);
    ok = ok && err <= 1e-4 && std::abs(slope - (m + 1)) <= 0.3;
    d << "m=" << m << " err " << fmt("%.2e", err) << " slope " << fmt("%.3f", slope) << (m < 2 ? "; " : "");
  }
  return {ok, d.str()};
}

std::vector<QuasinormSpec> fixture_specs() {
  return {{QuasinormKind::besov_high_p, INFINITY, INFINITY, 0.5},
          {QuasinormKind::besov_high_p, 2.0, 2.0, 0.5},
          {QuasinormKind::triebel_lizorkin, 2.0, 2.0, 0.5},
          {QuasinormKind::besov_low_p, 0.5, 1.0, 1.5}};
}

Outcome a5() {
  DyadicGrid g(12);
  const MollifierStack st = MollifierStack::build(g, 1.5);
  const GermPtr germ = taylor_germ(SmoothFunction::sine(), 1);
  bool ok = true;
  std::ostringstream d;
  for (const QuasinormSpec& spec : fixture_specs()) {
    TheoremRequest req;
    req.spec = spec;
    req.r = 1.5;
    req.k_min = 2;
    req.k_max = 5;
    const TheoremReport rep = verify_theorem_2_1(*germ, st, req);
    ok = ok && rep.pass;
    d << spec.describe() << " ratio " << fmt("%.4f", rep.ratio) << (rep.degenerate ? " (A=0)" : "") << "; ";
  }
  std::string s = d.str();
  s.resize(s.size() - 2);
  return {ok, s};
}

// Spikes one level-(k0+l) cell wide, spaced 2^{1-k0}; nonzero only at scale k0 + l.
MultiscaleField spike_field(const DyadicGrid& g, int k0, int l) {
  MultiscaleField H(g, k0, k0 + l);
  auto s = H.mutable_slice(k0 + l);
  const std::size_t spacing = s.size() >> (k0 - 1);
  for (std::size_t j = 0; j < s.size(); j += spacing) s[j] = 1.0;
  return H;
}

Outcome a6() {
  DyadicGrid g(12);
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  for (const QuasinormSpec& spec : fixture_specs()) {
    for (int trial = 0; trial < 100; ++trial) {
      MultiscaleField H(g, 1, 8);
      for (int k = 1; k <= 8; ++k)
        for (double& v : H.mutable_slice(k)) v = unif(rng);
      for (int l = 0; l <= 4; ++l) worst = std::max(worst, scaling_check(spec, H, l).ratio);
    }
  }
  const QuasinormSpec low{QuasinormKind::besov_low_p, 0.5, 1.0, 1.5};
  bool spikes_exceed = true;
  double spike_correct = 0.0;
  std::ostringstream sp;
  for (int l = 1; l <= 4; ++l) {
    const MultiscaleField H = spike_field(g, 2, l);
    const double wrong = scaling_check(low, H, l, low.gamma_or_nu).ratio;
    spike_correct = std::max(spike_correct, scaling_check(low, H, l).ratio);
    spikes_exceed = spikes_exceed && wrong > 1.0;
    sp << " " << fmt("%.2f", wrong);
  }
  const bool ok = worst <= C_scaling && spike_correct <= C_scaling && spikes_exceed;
  return {ok, "random worst " + fmt("%.3f", worst) + "; spike ratios with gamma'=nu at l=1..4:" + sp.str() +
                  "; corrected " + fmt("%.3f", spike_correct)};
}

Outcome a7() {
  DyadicGrid g(12);
  const MollifierStack st = MollifierStack::build(g, 2.5);
  const SmoothFunction f = SmoothFunction::cosine(), g0 = SmoothFunction::sine();
  const TwoParamProcess A = TwoParamProcess::young(f, g0);
  SewOptions opts;
  opts.q = INFINITY;
  const SewnPath path = sew(A, st, opts);
  const std::vector<double> oracle = riemann_stieltjes(f, g0, 12);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(path.g[i] - oracle[i]));
  const SewingBoundReport b = sewing_bound(A, path, 1.5, 2.0, INFINITY, 1, 8);
  const bool ok = err <= 1e-4 && b.pass;
  return {ok, "Riemann-Stieltjes error " + fmt("%.2e", err) + ", b(dg-A) " + fmt("%.4f", b.remainder_norm) +
                  " vs bbar(dA) " + fmt("%.4f", b.delta_norm) + " (ratio " + fmt("%.4f", b.ratio) + ")"};
}

Outcome a8() {
  DyadicGrid g(13);
  const double r = 2.5;
  const MollifierStack e = MollifierStack::build(g, r, BumpKind::exponential);
  const MollifierStack p = MollifierStack::build(g, r, BumpKind::polynomial);
  const double tol = 2.0 * std::max(1e-6, 1e-4);
  const GermPtr cg = constant_germ(sine_samples(g));
  const GermPtr tg = taylor_germ(SmoothFunction::sine(), 1);
  const double dc = (reconstruct(*cg, e, 9).f - reconstruct(*cg, p, 9).f).sup_norm();
  const double dt = (reconstruct(*tg, e, 9).f - reconstruct(*tg, p, 9).f).sup_norm();
  return {dc <= tol && dt <= tol,
          "constant germ " + fmt("%.2e", dc) + ", taylor germ " + fmt("%.2e", dt) + " (tolerance " + fmt("%.0e", tol) + ")"};
}

Outcome a9() {
  DyadicGrid g20(20);
  const MollifierStack s20 = MollifierStack::build(g20, 1.5);
  const GermPtr i20 = incoherent_germ(g20, 42);
  const CoherenceReport rep = h_field(*i20, s20, 1.5, 2, 2, 16);

  DyadicGrid g14(14);
  const MollifierStack s14 = MollifierStack::build(g14, 1.5);
  const GermPtr i14 = incoherent_germ(g14, 42);
  const std::vector<double> inc = increment_sweep(*i14, s14, 4, 10);
  bool stalls = true;
  double worst = INFINITY;
  for (std::size_t i = 1; i < inc.size(); ++i) {
    const double ratio = inc[i - 1] > 0.0 ? inc[i] / inc[i - 1] : NAN;
    stalls = stalls && ratio >= 0.9;
    worst = std::min(worst, ratio);
  }
  const double largest = *std::max_element(inc.begin(), inc.end());
  std::ostringstream d;
  d << "divergence_flag(L=16) " << (rep.divergence_flag ? "true" : "false") << "; max sup|f_{n+1}-f_n| over n=4..9 "
    << fmt("%.2e", largest) << ", min ratio " << (std::isnan(worst) ? std::string("undefined") : fmt("%.3f", worst));
  return {rep.divergence_flag && stalls, d.str()};
}

Outcome a10() {
  const ChiPartitionReport rep = chi_partition_check(DyadicGrid(10));
  const bool ok = rep.max_residual <= 1e-10 && rep.support_lo >= 0.2 && rep.support_hi <= 0.6 && rep.samples >= 1023;
  return {ok, "residual " + fmt("%.2e", rep.max_residual) + " over " + std::to_string(rep.samples) +
                  " points, support [" + fmt("%.4f", rep.support_lo) + ", " + fmt("%.4f", rep.support_hi) + "]"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria A1..A10"};
  std::vector<std::string> expect_fail, only;
  app.add_option("--expect-fail", expect_fail, "criteria known to fail");
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
      {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}, {"A10", a10}};
  const std::set<std::string> expected(expect_fail.begin(), expect_fail.end());
  const std::set<std::string> selected(only.begin(), only.end());

  int surprises = 0;
  for (const auto& [name, run] : criteria) {
    if (!selected.empty() && !selected.count(name)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool known = expected.count(name) > 0;
    std::printf("%-4s %s  %s  [%.1fs]%s\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                known ? (o.pass ? "  (expected FAIL, got PASS)" : "  (expected)") : "");
    std::fflush(stdout);
    if (o.pass == known) ++surprises;
  }
  return surprises == 0 ? 0 : 1;
}
