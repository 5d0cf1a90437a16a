#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "csv.hpp"
#include "recon/coherence.hpp"
#include "recon/quasinorm.hpp"
#include "recon/reconstruct.hpp"
#include "recon/sewing.hpp"

namespace recon::cli {

int StageError::exit_status() const noexcept {
  switch (kind_) {
    case ErrorKind::moment_residual:
    case ErrorKind::route_disagreement:
    case ErrorKind::singular_system:
    case ErrorKind::nonpositive_value:
    case ErrorKind::partition_residual:
      return exit_assertion;
    default:
      return exit_config;
  }
}

namespace {

template <class F>
auto stage(const char* module, const char* op, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw StageError(module, op, e);
  }
}

std::string num(double v) { return format_number(v); }
std::string num(int v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string flag(bool b) { return b ? "1" : "0"; }
const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

class Output {
 public:
  explicit Output(const Resolved& cfg) : dir_(cfg.raw.out), config_(cfg.describe()) {
    std::filesystem::create_directories(dir_);
  }

  CsvWriter open(const char* name, const std::vector<std::string>& header) const {
    return CsvWriter(dir_ / name, config_, header);
  }

  void field(const char* name, const MultiscaleField& f) const {
    CsvWriter w = open(name, {"k", "x", "value"});
    for (int k = f.k_min(); k <= f.k_max(); ++k)
      for (std::size_t j = 0; j < f.count(k); ++j) w.row({num(k), num(f.point(k, j)), num(f.at(k, j))});
  }

 private:
  std::filesystem::path dir_;
  std::string config_;
};

MollifierStack make_stack(const Resolved& c, double r) {
  return stage("mollifier", "build", [&] { return MollifierStack::build(DyadicGrid(c.raw.nmax), r, c.bump); });
}

CoherenceOptions coherence_options(const Resolved& c) {
  CoherenceOptions o;
  o.exec = c.exec;
  o.mode = c.mode;
  return o;
}

// Largest |moment_a(phi)| over 1 <= a <= r_tilde, and |mass - 1|.
std::pair<double, double> moment_defect(const MollifierStack& st) {
  double worst = 0.0;
  for (int a = 1; a <= st.r_tilde(); ++a) worst = std::max(worst, std::abs(moment(st.phi(), a)));
  return {worst, std::abs(moment(st.phi(), 0) - 1.0)};
}

double telescope_defect(const MollifierStack& st) {
  double worst = 0.0;
  for (int n = 0; n <= st.grid().n_max() - 6; ++n)
    worst = std::max(worst, stage("mollifier", "check_telescope_identity", [&] { return check_telescope_identity(st, n); }));
  return worst;
}

int run_moments(const Resolved& c, std::ostream& log) {
  const Output out(c);
  const MollifierStack st = make_stack(c, c.raw.r);
  const int rt = st.r_tilde();
  {
    CsvWriter w = out.open("moments.csv", {"object", "scale", "alpha", "moment", "scaled_moment"});
    for (int a = 0; a <= rt + 1; ++a) {
      const double m = moment(st.phi(), a);
      w.row({"phi", "", num(a), num(m), num(m)});
    }
    for (int n = 0; n <= c.raw.nmax - 4; ++n) {
      const SampledFunction phi = st.phi_at(n).to_sampled();
      for (int a = 0; a <= rt + 1; ++a) {
        const double m = moment(phi, a);
        w.row({"phi_n", num(n), num(a), num(m), num(m * std::exp2(n * a))});
      }
    }
  }
  {
    CsvWriter w = out.open("coefficients.csv", {"index", "coefficient"});
    for (std::size_t i = 0; i < st.coefficients().size(); ++i) w.row({num(i), num(st.coefficients()[i])});
  }
  double tele = 0.0;
  {
    CsvWriter w = out.open("telescope.csv", {"n", "discrete", "resampled"});
    for (int n = 0; n <= c.raw.nmax - 6; ++n) {
      const double d = check_telescope_identity(st, n);
      const double s = check_telescope_identity(st, n, {TelescopeRoute::resampled, false});
      tele = std::max(tele, d);
      w.row({num(n), num(d), num(s)});
    }
  }
  const auto [mom, mass] = moment_defect(st);
  const bool ok = mom <= 1e-8 && mass <= 1e-10 && tele <= 1e-8;
  log << "moments: r_tilde " << rt << ", max|moment| " << num(mom) << ", |mass-1| " << num(mass)
      << ", telescope " << num(tele) << "  " << verdict(ok) << '\n';
  return ok ? exit_pass : exit_assertion;
}

int run_coherence(const Resolved& c, std::ostream& log) {
  const Output out(c);
  const MollifierStack st = make_stack(c, c.raw.r);
  const GermPtr germ = stage("germ", "select", [&] { return make_germ(c.germ, st.grid()); });
  const CoherenceReport rep = stage("coherence", "h_field", [&] {
    return h_field(*germ, st, c.raw.r, c.raw.k_min, c.k_max, c.raw.truncation, coherence_options(c));
  });
  CsvWriter w = out.open("coherence.csv", {"k", "x", "value", "tail", "flag"});
  for (int k = c.raw.k_min; k <= c.k_max; ++k)
    for (std::size_t j = 0; j < rep.field.count(k); ++j)
      w.row({num(k), num(rep.field.point(k, j)), num(rep.field.at(k, j)), num(rep.tail.at(k, j)),
             flag(rep.divergence_flag)});
  log << "coherence: sup H " << num(rep.field.sup()) << ", divergence_flag " << flag(rep.divergence_flag) << '\n';
  return exit_pass;
}

int run_norms(const Resolved& c, std::ostream& log) {
  const Output out(c);
  const DyadicGrid grid(c.raw.nmax);
  MultiscaleField field = c.raw.input.empty() ? [&] {
    const MollifierStack st = make_stack(c, c.raw.r);
    const GermPtr germ = stage("germ", "select", [&] { return make_germ(c.germ, grid); });
    return stage("coherence", "h_field", [&] {
      return h_field(*germ, st, c.raw.r, c.raw.k_min, c.k_max, c.raw.truncation, coherence_options(c)).field;
    });
  }() : read_field_csv(c.raw.input, grid);
  const double value = stage("quasinorm", "apply", [&] { return apply(c.spec, field); });
  CsvWriter w = out.open("norms.csv", {"spec", "effective_gamma", "k_min", "k_max", "value"});
  w.row({c.spec.describe(), num(c.spec.effective_gamma()), num(field.k_min()), num(field.k_max()), num(value)});
  log << num(value) << '\n';
  return exit_pass;
}

int run_reconstruct(const Resolved& c, std::ostream& log) {
  const Output out(c);
  const MollifierStack st = make_stack(c, c.raw.r);
  const GermPtr germ = stage("germ", "select", [&] { return make_germ(c.germ, st.grid()); });
  ReconstructOptions opts;
  opts.mode = c.mode;
  opts.exec = c.exec;
  const Reconstruction rec = stage("reconstruct", "reconstruct", [&] { return reconstruct(*germ, st, c.n_stop, opts); });
  {
    CsvWriter w = out.open("f.csv", {"x", "f"});
    for (std::size_t i = 0; i < rec.f.size(); ++i) w.row({num(st.grid().point(static_cast<std::ptrdiff_t>(i))), num(rec.f[i])});
  }
  const MultiscaleField delta = stage("reconstruct", "error_field", [&] {
    return error_field(rec, *germ, standard_dictionary(st, c.raw.r), c.raw.k_min, c.k_max,
                       {MultiscaleField::default_oversample, c.exec});
  });
  out.field("delta.csv", delta);

  std::vector<double> ks, sups;
  for (int k = c.raw.k_min; k <= c.k_max; ++k) {
    double s = 0.0;
    for (double v : delta.slice(k)) s = std::max(s, v);
    ks.push_back(k);
    sups.push_back(s);
  }
  bool fit = ks.size() >= 2;
  for (double s : sups) fit = fit && s > 0.0;
  const double slope = fit ? log2_slope(ks, sups) : NAN;
  CsvWriter w = out.open("summary.csv", {"quantity", "k", "value"});
  w.row({"n_stop", "", num(c.n_stop)});
  w.row({"last_increment", "", num(rec.last_increment)});
  for (std::size_t i = 0; i < ks.size(); ++i) w.row({"sup_delta", num(static_cast<int>(ks[i])), num(sups[i])});
  w.row({"decay_rate", "", num(-slope)});
  const bool ok = rec.f.sup_norm() < INFINITY && delta.all_finite();
  log << "reconstruct: n_stop " << c.n_stop << ", last increment " << num(rec.last_increment) << ", sup delta "
      << num(delta.sup()) << ", decay rate " << num(-slope) << "  " << verdict(ok) << '\n';
  return ok ? exit_pass : exit_assertion;
}

SewOptions sew_options(const Resolved& c, double eta, double p, double q, double r) {
  SewOptions o;
  o.eta = eta;
  o.p = p;
  o.q = q;
  o.r = r;
  o.n_stop = c.n_stop;
  o.exec = c.exec;
  return o;
}

SewingBoundReport sewing_run(const Resolved& c, const TwoParamProcess& A, const SewOptions& o, int k_min, int k_max,
                             const Output* out) {
  const MollifierStack st = make_stack(c, o.r);
  const SewnPath path = stage("sewing", "sew", [&] { return sew(A, st, o); });
  if (out != nullptr) {
    const SewnPath oracle = stage("sewing", "sew", [&] { return sew(A, st, o, SewRoute::diagonal_oracle); });
    CsvWriter w = out->open("g.csv", {"x", "g", "oracle"});
    for (std::size_t i = 0; i < path.g.size(); ++i)
      w.row({num(st.grid().point(static_cast<std::ptrdiff_t>(i))), num(path.g[i]), num(oracle.g[i])});
  }
  NormOptions norms;
  norms.exec = c.exec;
  return stage("sewing", "sewing_bound", [&] { return sewing_bound(A, path, o.eta, o.p, o.q, k_min, k_max, norms); });
}

int run_sewing(const Resolved& c, std::ostream& log) {
  const Output out(c);
  const TwoParamProcess A = make_fixture(c.raw.fixture);
  const SewOptions o = sew_options(c, c.raw.eta, c.spec.p, c.spec.q, c.raw.r);
  const SewingBoundReport rep = sewing_run(c, A, o, c.raw.k_min, c.k_max, &out);
  CsvWriter w = out.open("norms.csv", {"fixture", "eta", "p", "q", "k_min", "k_max", "remainder_norm", "delta_norm",
                                       "ratio", "C_sew", "pass"});
  w.row({c.raw.fixture, num(o.eta), num(o.p), num(o.q), num(c.raw.k_min), num(c.k_max), num(rep.remainder_norm),
         num(rep.delta_norm), num(rep.ratio), num(C_sew), flag(rep.pass)});
  log << "sewing: b(dg-A) " << num(rep.remainder_norm) << " vs bbar(dA) " << num(rep.delta_norm) << ", ratio "
      << num(rep.ratio) << " (C_sew " << num(C_sew) << ")  " << verdict(rep.pass) << '\n';
  return rep.pass ? exit_pass : exit_assertion;
}

TheoremReport theorem_run(const Resolved& c, const Germ& germ, const MollifierStack& st) {
  TheoremRequest req;
  req.spec = c.spec;
  req.r = c.raw.r;
  req.k_min = c.raw.k_min;
  req.k_max = c.k_max;
  req.l_min = c.raw.l_min;
  req.l_max = c.raw.l_max;
  req.n_stop = c.n_stop;
  req.coherence = coherence_options(c);
  return stage("reconstruct", "verify_theorem_2_1", [&] { return verify_theorem_2_1(germ, st, req); });
}

int run_verify(const Resolved& c, std::ostream& log) {
  const Output out(c);
  const MollifierStack st = make_stack(c, c.raw.r);
  const GermPtr germ = stage("germ", "select", [&] { return make_germ(c.germ, st.grid()); });
  const TheoremReport rep = theorem_run(c, *germ, st);
  {
    CsvWriter w = out.open("verify.csv", {"spec", "alpha", "A", "error_norm", "ratio", "C_thm", "degenerate", "n_stop",
                                          "pass"});
    w.row({rep.spec, num(rep.alpha), num(rep.A), num(rep.error_norm), num(rep.ratio), num(C_thm),
           flag(rep.degenerate), num(rep.n_stop), flag(rep.pass)});
  }
  {
    CsvWriter w = out.open("levels.csv", {"l", "coefficient_norm", "coefficient_bound", "second_sum_norm",
                                          "second_sum_bound"});
    for (const TheoremLevel& lv : rep.levels)
      w.row({num(lv.l), num(lv.coefficient_norm), num(lv.coefficient_bound), num(lv.second_sum_norm),
             num(lv.second_sum_bound)});
  }
  log << "verify: " << rep.spec << ", alpha " << num(rep.alpha) << ", A " << num(rep.A) << ", N[Delta] "
      << num(rep.error_norm) << ", ratio " << num(rep.ratio) << " (C_thm " << num(C_thm) << ")  " << verdict(rep.pass)
      << '\n';
  return rep.pass ? exit_pass : exit_assertion;
}

struct ReportRow {
  std::string assertion;
  double observed;
  double pinned;
};

int run_report(const Resolved& c, std::ostream& log) {
  const Output out(c);
  std::vector<ReportRow> rows;

  const MollifierStack st = make_stack(c, c.raw.r);
  rows.push_back({"moments vanish", moment_defect(st).first, 1e-8});
  rows.push_back({"telescope identity", telescope_defect(st), 1e-8});

  const GermPtr germ = stage("germ", "select", [&] { return make_germ(c.germ, st.grid()); });
  const TheoremReport thm = theorem_run(c, *germ, st);
  rows.push_back({"theorem ratio " + thm.spec, thm.ratio, C_thm});

  const Reconstruction rec = stage("reconstruct", "reconstruct", [&] { return reconstruct(*germ, st, c.n_stop, {c.mode, false, c.exec}); });
  const MultiscaleField delta = stage("reconstruct", "error_field", [&] {
    return error_field(rec, *germ, standard_dictionary(st, c.raw.r), c.raw.k_min, c.k_max,
                       {MultiscaleField::default_oversample, c.exec});
  });
  const CoherenceReport H = stage("coherence", "h_field", [&] {
    return h_field(*germ, st, c.raw.r, c.raw.k_min, c.k_max, c.raw.l_max + 1, coherence_options(c));
  });
  double rec_ratio = 0.0;
  for (int k = c.raw.k_min; k <= c.k_max; ++k)
    for (std::size_t j = 0; j < delta.count(k); ++j) {
      const double d = delta.at(k, j), h = H.field.at(k, j);
      if (h > 0.0) rec_ratio = std::max(rec_ratio, d / h);
      else if (d > 1e-12) rec_ratio = INFINITY;
    }
  rows.push_back({"pointwise Delta/H", rec_ratio, C_rec});

  // Young fixture at eta 1.5, p 2, q inf, r 2.5.
  const int sew_k_max = std::min(8, c.raw.nmax - 4);
  const SewingBoundReport sb = sewing_run(c, make_fixture("young"), sew_options(c, 1.5, 2.0, INFINITY, 2.5), 1,
                                          sew_k_max, nullptr);
  rows.push_back({"sewing ratio young eta=1.5 p=2 q=inf", sb.ratio, C_sew});

  std::mt19937_64 rng(c.raw.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double scaling = 0.0;
  const DyadicGrid grid(c.raw.nmax);
  for (int trial = 0; trial < 20; ++trial) {
    MultiscaleField f(grid, 1, c.raw.nmax - 4);
    for (int k = f.k_min(); k <= f.k_max(); ++k)
      for (double& v : f.mutable_slice(k)) v = unif(rng);
    for (int l = 0; l <= 4; ++l)
      scaling = std::max(scaling, stage("quasinorm", "scaling_check", [&] { return scaling_check(c.spec, f, l).ratio; }));
  }
  rows.push_back({"scaling ratio " + c.spec.describe(), scaling, C_scaling});

  const ChiPartitionReport chi = stage("sewing", "chi_partition_check", [&] { return chi_partition_check(grid); });
  rows.push_back({"chi partition residual", chi.max_residual, 1e-10});

  bool all = true;
  CsvWriter w = out.open("report.csv", {"assertion", "observed", "pinned", "pass"});
  for (const ReportRow& row : rows) {
    const bool ok = row.observed <= row.pinned;
    all = all && ok;
    w.row({row.assertion, num(row.observed), num(row.pinned), flag(ok)});
    log << verdict(ok) << "  " << row.assertion << ": " << num(row.observed) << " <= " << num(row.pinned) << '\n';
  }
  return all ? exit_pass : exit_assertion;
}

double parse_cell(const std::string& text, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError("input", "line " + std::to_string(line) + ": not a number '" + text + "'");
  return v;
}

}  // namespace

MultiscaleField read_field_csv(const std::filesystem::path& path, const DyadicGrid& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("input", "cannot read " + path.string());
  std::map<int, std::vector<std::pair<double, double>>> levels;
  std::vector<std::string> header;
  std::size_t ck = 0, cx = 0, cv = 0;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> rec = parse_record(line);
    if (header.empty()) {
      header = rec;
      const auto col = [&](const char* name) {
        for (std::size_t i = 0; i < header.size(); ++i)
          if (header[i] == name) return i;
        throw ConfigError("input", std::string("missing column '") + name + "'");
      };
      ck = col("k");
      cx = col("x");
      cv = col("value");
      continue;
    }
    if (rec.size() != header.size())
      throw ConfigError("input", "line " + std::to_string(no) + ": expected " + std::to_string(header.size()) + " fields");
    const double k = parse_cell(rec[ck], no);
    if (k != std::floor(k) || k < 0 || k > grid.n_max())
      throw ConfigError("input", "line " + std::to_string(no) + ": bad level '" + rec[ck] + "'");
    levels[static_cast<int>(k)].emplace_back(parse_cell(rec[cx], no), parse_cell(rec[cv], no));
  }
  if (levels.empty()) throw ConfigError("input", "no rows");
  const int k_min = levels.begin()->first, k_max = levels.rbegin()->first;
  if (static_cast<int>(levels.size()) != k_max - k_min + 1) throw ConfigError("input", "levels are not contiguous");
  for (int os = 1; os <= grid.n_max(); ++os) {
    MultiscaleField f(grid, k_min, k_max, os);
    bool match = true;
    for (const auto& [k, rows] : levels) match = match && rows.size() == f.count(k);
    if (!match) continue;
    for (const auto& [k, rows] : levels)
      for (std::size_t j = 0; j < rows.size(); ++j) {
        if (std::abs(rows[j].first - f.point(k, j)) > 1e-9)
          throw ConfigError("input", "level " + std::to_string(k) + " row " + std::to_string(j) + ": x is off the level grid");
        f.at(k, j) = rows[j].second;
      }
    return f;
  }
  throw ConfigError("input", "row counts do not match a dyadic layout on nmax " + std::to_string(grid.n_max()));
}

int run(const Resolved& cfg, std::ostream& log) {
  switch (cfg.command) {
    case Command::moments: return run_moments(cfg, log);
    case Command::coherence: return run_coherence(cfg, log);
    case Command::norms: return run_norms(cfg, log);
    case Command::reconstruct: return run_reconstruct(cfg, log);
    case Command::sewing: return run_sewing(cfg, log);
    case Command::verify: return run_verify(cfg, log);
    case Command::report: return run_report(cfg, log);
  }
  return exit_config;
}

}  // namespace recon::cli
