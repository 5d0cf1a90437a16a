#include "app.hpp"

#include <CLI11.hpp>
#include <vector>

#include "commands.hpp"
#include "config.hpp"

namespace recon::cli {

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical lab for reconstruction on the dyadic torus", "recon"};
  app.set_config("--config", "", "Flat key = value file; flags given on the command line win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);
  app.fallthrough();

  ExperimentConfig cfg;
  std::string gamma, nu, k_max, n_stop;
  app.add_option("--nmax", cfg.nmax, "Grid level, N = 2^nmax");
  app.add_option("--r", cfg.r, "Test-class regularity");
  app.add_option("--bump", cfg.bump, "exponential or polynomial");
  app.add_option("--germ", cfg.germ, "constant:FN, taylor:FN:ORDER, incoherent[:SEED], young, sewing:NAME");
  app.add_option("--kind", cfg.kind, "besov, besov-lowp or triebel-lizorkin");
  app.add_option("--p", cfg.p, "Integrability exponent (number or inf)");
  app.add_option("--q", cfg.q, "Summability exponent (number or inf)");
  app.add_option("--gamma", gamma, "Regularity exponent for besov and triebel-lizorkin");
  app.add_option("--nu", nu, "Regularity exponent for besov-lowp");
  app.add_option("--k-min", cfg.k_min, "Coarsest scale");
  app.add_option("--k-max", k_max, "Finest scale (defaults to the largest the budget allows)");
  app.add_option("--l-min", cfg.l_min, "First l in the alpha fit");
  app.add_option("--l-max", cfg.l_max, "Last l in the alpha fit");
  app.add_option("--truncation", cfg.truncation, "Number of terms L kept in each coherence sum");
  app.add_option("--n-stop", n_stop, "Last reconstruction level (defaults to nmax - 4)");
  app.add_option("--mode", cfg.mode, "positive or negative");
  app.add_option("--fixture", cfg.fixture, "Sewing fixture: young, increment, linear, square");
  app.add_option("--eta", cfg.eta, "Sewing exponent");
  app.add_option("--input", cfg.input, "k,x,value CSV for the norms command");
  app.add_option("--out", cfg.out, "Output directory");
  app.add_option("--seed", cfg.seed, "Seed for random fixtures");
  app.add_option("--exec", cfg.exec, "serial or parallel");

  const std::vector<std::pair<const char*, const char*>> commands{
      {"moments", "Moment table of the mollifier stack and telescope residuals"},
      {"coherence", "Coherence field H(k, x) of a germ"},
      {"norms", "Quasinorm of a field read from --input or computed from --germ"},
      {"reconstruct", "Reconstruction f and error field Delta"},
      {"sewing", "Sewn path of a fixture and the sewing bound"},
      {"verify", "End-to-end check N[Delta] <= C_thm A"},
      {"report", "Regression report over the recorded constants"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  }

  try {
    const auto number = [](const char* field, const std::string& text) {
      try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
      } catch (const std::exception&) {
      }
      throw ConfigError(field, "expected a number, got '" + text + "'");
    };
    const auto integer = [](const char* field, const std::string& text) {
      try {
        std::size_t used = 0;
        const int v = std::stoi(text, &used);
        if (used == text.size()) return v;
      } catch (const std::exception&) {
      }
      throw ConfigError(field, "expected an integer, got '" + text + "'");
    };
    if (!gamma.empty()) cfg.gamma = number("gamma", gamma);
    if (!nu.empty()) cfg.nu = number("nu", nu);
    if (!k_max.empty()) cfg.k_max = integer("k-max", k_max);
    if (!n_stop.empty()) cfg.n_stop = integer("n-stop", n_stop);

    const Resolved resolved = resolve(parse_command(app.get_subcommands().front()->get_name()), cfg);
    return run(resolved, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const StageError& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_status();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_assertion;
  }
}

}  // namespace recon::cli
