#include "config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <vector>

#include "csv.hpp"
#include "recon/error.hpp"

namespace recon::cli {

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <class T>
T parse_integer(std::string_view field, std::string_view text) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError(std::string(field), "expected an integer, got '" + std::string(text) + "'");
  return v;
}

SmoothFunction smooth_by_name(std::string_view name) {
  if (name == "sin") return SmoothFunction::sine();
  if (name == "cos") return SmoothFunction::cosine();
  throw ConfigError("germ", "unknown function '" + std::string(name) + "' (expected sin or cos)");
}

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

std::string num(double v) { return format_number(v); }

}  // namespace

Command parse_command(std::string_view name) {
  if (name == "moments") return Command::moments;
  if (name == "coherence") return Command::coherence;
  if (name == "norms") return Command::norms;
  if (name == "reconstruct") return Command::reconstruct;
  if (name == "sewing") return Command::sewing;
  if (name == "verify") return Command::verify;
  if (name == "report") return Command::report;
  throw ConfigError("command", "unknown command '" + std::string(name) + "'");
}

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::moments: return "moments";
    case Command::coherence: return "coherence";
    case Command::norms: return "norms";
    case Command::reconstruct: return "reconstruct";
    case Command::sewing: return "sewing";
    case Command::verify: return "verify";
    case Command::report: return "report";
  }
  return "report";
}

double parse_exponent(std::string_view field, std::string_view text) {
  if (text == "inf" || text == "infinity") return INFINITY;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(v > 0.0) || !std::isfinite(v))
    throw ConfigError(std::string(field), "expected a positive number or inf, got '" + std::string(text) + "'");
  return v;
}

GermSelector parse_germ_selector(std::string_view text, std::uint64_t default_seed) {
  const std::vector<std::string> parts = split(text, ':');
  GermSelector sel;
  sel.family = parts[0];
  const auto arity = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo || parts.size() > hi)
      throw ConfigError("germ", "malformed selector '" + std::string(text) + "'");
  };
  if (sel.family == "constant") {
    arity(2, 2);
    sel.function = parts[1];
    smooth_by_name(sel.function);
  } else if (sel.family == "taylor") {
    arity(3, 3);
    sel.function = parts[1];
    smooth_by_name(sel.function);
    sel.order = parse_integer<int>("germ", parts[2]);
    require(sel.order >= 0 && sel.order <= 3, "germ", "taylor order must lie in 0..3");
  } else if (sel.family == "incoherent") {
    arity(1, 2);
    sel.seed = parts.size() == 2 ? parse_integer<std::uint64_t>("germ", parts[1]) : default_seed;
  } else if (sel.family == "young") {
    arity(1, 1);
    sel.family = "sewing";
    sel.fixture = "young";
  } else if (sel.family == "sewing") {
    arity(2, 2);
    sel.fixture = parts[1];
    try {
      make_fixture(sel.fixture);
    } catch (const ConfigError& e) {
      throw ConfigError("germ", e.what());
    }
  } else {
    throw ConfigError("germ", "unknown germ family '" + sel.family + "'");
  }
  return sel;
}

GermPtr make_germ(const GermSelector& sel, const DyadicGrid& grid) {
  if (sel.family == "constant") {
    const SmoothFunction f = smooth_by_name(sel.function);
    return constant_germ(SampledFunction::from_periodic(grid, [&](double x) { return f(x); }));
  }
  if (sel.family == "taylor") return taylor_germ(smooth_by_name(sel.function), sel.order);
  if (sel.family == "incoherent") return incoherent_germ(grid, sel.seed);
  return sewing_germ(make_fixture(sel.fixture));
}

TwoParamProcess make_fixture(std::string_view name) {
  if (name == "young") return TwoParamProcess::young(SmoothFunction::cosine(), SmoothFunction::sine());
  if (name == "increment") return TwoParamProcess::increment(SmoothFunction::sine());
  if (name == "linear") return TwoParamProcess::linear();
  if (name == "square") return TwoParamProcess::square();
  throw ConfigError("fixture", "unknown fixture '" + std::string(name) + "' (young, increment, linear, square)");
}

Resolved resolve(Command command, const ExperimentConfig& cfg) {
  Resolved out;
  out.command = command;
  out.raw = cfg;

  require(cfg.nmax >= 8 && cfg.nmax <= 20, "nmax", "must lie in 8..20, got " + std::to_string(cfg.nmax));
  const DyadicGrid grid(cfg.nmax);
  require(cfg.r > 0.0 && std::isfinite(cfg.r), "r", "must be positive, got " + num(cfg.r));
  try {
    out.bump = parse_bump_kind(cfg.bump);
  } catch (const Error& e) {
    throw ConfigError("bump", e.what());
  }
  try {
    out.mode = parse_regularity_mode(cfg.mode);
  } catch (const Error& e) {
    throw ConfigError("mode", e.what());
  }
  if (cfg.exec == "serial") {
    out.exec = Exec::serial;
  } else {
    require(cfg.exec == "parallel", "exec", "expected serial or parallel, got '" + cfg.exec + "'");
  }
  out.germ = parse_germ_selector(cfg.germ, cfg.seed);

  try {
    out.spec.kind = parse_quasinorm_kind(cfg.kind);
  } catch (const Error& e) {
    throw ConfigError("kind", e.what());
  }
  out.spec.p = parse_exponent("p", cfg.p);
  out.spec.q = parse_exponent("q", cfg.q);
  const bool low = out.spec.kind == QuasinormKind::besov_low_p;
  require(!(low && cfg.gamma), "gamma", "besov-lowp takes nu, not gamma");
  require(low || !cfg.nu, "nu", "nu applies only to besov-lowp");
  out.spec.gamma_or_nu = low ? cfg.nu.value_or(1.5) : cfg.gamma.value_or(0.5);
  try {
    out.spec.validate();
  } catch (const Error& e) {
    throw ConfigError(low ? "p" : "kind", e.what());
  }

  out.n_stop = cfg.n_stop.value_or(default_n_stop(grid));
  require(out.n_stop >= 1 && out.n_stop <= cfg.nmax - 4, "n-stop",
          "must lie in 1..nmax-4 = " + std::to_string(cfg.nmax - 4) + ", got " + std::to_string(out.n_stop));
  require(cfg.k_min >= 1, "k-min", "must be at least 1");
  require(cfg.l_min >= 0 && cfg.l_max >= cfg.l_min, "l-max", "need 0 <= l-min <= l-max");
  require(cfg.truncation >= 1, "truncation", "must be at least 1");
  require(cfg.eta > 0.0, "eta", "must be positive");

  int budget = cfg.nmax - 4;
  const char* budget_rule = "nmax - 4";
  switch (command) {
    case Command::coherence:
    case Command::norms:
      budget = cfg.nmax - 2 - cfg.truncation;
      budget_rule = "nmax - 2 - truncation";
      break;
    case Command::reconstruct:
      budget = out.n_stop - 2;
      budget_rule = "n-stop - 2";
      break;
    case Command::verify:
    case Command::report:
      budget = std::min(out.n_stop - 2, cfg.nmax - 3 - cfg.l_max);
      budget_rule = "min(n-stop - 2, nmax - 3 - l-max)";
      require(cfg.l_max - cfg.l_min >= 2, "l-max", "the alpha fit needs at least three values of l");
      break;
    case Command::sewing:
      require(cfg.eta > 1.0, "eta", "sewing needs eta > 1, got " + num(cfg.eta));
      require(cfg.r > 1.0, "r", "sewing needs r > 1, got " + num(cfg.r));
      require(out.spec.p >= 1.0, "p", "sewing is only available for p >= 1");
      make_fixture(cfg.fixture);
      break;
    case Command::moments:
      break;
  }
  out.k_max = cfg.k_max.value_or(budget);
  if (command != Command::moments) {
    require(out.k_max >= cfg.k_min, "k-max",
            "scale range " + std::to_string(cfg.k_min) + ".." + std::to_string(out.k_max) + " is empty (" +
                budget_rule + " = " + std::to_string(budget) + ")");
    require(out.k_max <= budget, "k-max",
            std::to_string(out.k_max) + " exceeds " + budget_rule + " = " + std::to_string(budget));
  }
  if (command == Command::norms && !cfg.input.empty())
    require(std::filesystem::is_regular_file(cfg.input), "input", "no such file '" + cfg.input + "'");
  require(!cfg.out.empty(), "out", "output directory must not be empty");
  return out;
}

std::string Resolved::describe() const {
  std::ostringstream s;
  s << "command=" << to_string(command) << " nmax=" << raw.nmax << " r=" << num(raw.r) << " bump=" << raw.bump
    << " germ=" << raw.germ << " kind=" << raw.kind << " p=" << raw.p << " q=" << raw.q
    << (spec.kind == QuasinormKind::besov_low_p ? " nu=" : " gamma=") << num(spec.gamma_or_nu)
    << " k-min=" << raw.k_min << " k-max=" << k_max << " l-min=" << raw.l_min << " l-max=" << raw.l_max
    << " truncation=" << raw.truncation << " n-stop=" << n_stop << " mode=" << raw.mode << " fixture=" << raw.fixture
    << " eta=" << num(raw.eta) << " input=" << raw.input << " out=" << raw.out << " seed=" << raw.seed
    << " exec=" << raw.exec;
  return s.str();
}

}  // namespace recon::cli
