#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "layoffcast/config.hpp"
#include "layoffcast/errors.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> input, out, variant, cutoffs, series, params, chain, count_mode;
  std::optional<double> baseline, dt, horizon, level;
  std::optional<int> iterations, burn_in, n_sims, weeks, from_week, to_week, threads;
  bool no_optimize = false;
  std::vector<std::string> settings;
};

void add_common(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "key = value config file");
  app.add_option("--seed", f.seed, "RNG seed");
  app.add_option("--input", f.input, "layoff event CSV (aggregate)");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--variant", f.variant, "snapshot|windowed");
  app.add_option("--baseline", f.baseline, "end-of-epidemic threshold, events/week");
  app.add_option("--iterations", f.iterations, "retained MCMC iterations");
  app.add_option("--burn-in", f.burn_in, "MCMC burn-in iterations");
  app.add_option("--cutoffs", f.cutoffs, "sensitivity cutoffs, e.g. 50..64");
  app.add_option("--series", f.series, "weekly series CSV (default OUT/series.csv)");
  app.add_option("--params", f.params, "parameter file (default OUT/params.txt)");
  app.add_option("--chain", f.chain, "posterior chain CSV (default OUT/chain.csv)");
  app.add_option("--dt", f.dt, "RK4 step, weeks");
  app.add_option("--horizon", f.horizon, "t_end scan horizon, weeks");
  app.add_option("--level", f.level, "credible / envelope level");
  app.add_option("--n-sims", f.n_sims, "simulated series for the envelope");
  app.add_option("--weeks", f.weeks, "weeks to simulate");
  app.add_option("--from-week", f.from_week, "first week index to aggregate");
  app.add_option("--to-week", f.to_week, "last week index to aggregate");
  app.add_option("--count-mode", f.count_mode, "per_event|per_company_week");
  app.add_option("--threads", f.threads, "worker threads for sensitivity (0 = all cores)");
  app.add_flag("--no-optimize", f.no_optimize, "fit: echo init_* parameters without optimizing");
  app.add_option("--set", f.settings, "override any config key, KEY=VALUE (repeatable)");
}

void apply_flags(layoffcast::RunConfig& cfg, const Flags& f) {
  using layoffcast::apply_setting;
  using layoffcast::format_double;
  if (f.seed) cfg.seed = *f.seed;
  if (f.input) cfg.input = *f.input;
  if (f.out) cfg.out_dir = *f.out;
  if (f.variant) apply_setting(cfg, "variant", *f.variant);
  if (f.baseline) cfg.baseline_override = *f.baseline;
  if (f.iterations) cfg.iterations = *f.iterations;
  if (f.burn_in) cfg.burn_in = *f.burn_in;
  if (f.cutoffs) apply_setting(cfg, "cutoffs", *f.cutoffs);
  if (f.series) cfg.series = *f.series;
  if (f.params) cfg.params = *f.params;
  if (f.chain) cfg.chain = *f.chain;
  if (f.dt) cfg.dt = *f.dt;
  if (f.horizon) cfg.horizon = *f.horizon;
  if (f.level) cfg.level = *f.level;
  if (f.n_sims) cfg.n_sims = *f.n_sims;
  if (f.weeks) cfg.sim_weeks = *f.weeks;
  if (f.from_week) cfg.from_week = *f.from_week;
  if (f.to_week) cfg.to_week = *f.to_week;
  if (f.count_mode) apply_setting(cfg, "count_mode", *f.count_mode);
  if (f.threads) cfg.threads = *f.threads;
  if (f.no_optimize) cfg.no_optimize = true;
  for (const auto& s : f.settings) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw layoffcast::FormatError("--set expects KEY=VALUE, got '" + s + "'");
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = layoffcast::cli;
  CLI::App app{"Fit an SIR + beta-binomial model to weekly layoff counts and forecast when they end"};
  app.require_subcommand(1, 1);
  Flags flags;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"aggregate", "aggregate event CSV into weekly counts and the 2021 baseline"},
      {"fit", "maximum-likelihood fit of the five model parameters"},
      {"sample", "Metropolis-Hastings posterior sampling from the fitted parameters"},
      {"forecast", "t_end point estimate, credible interval and histogram"},
      {"simulate", "posterior-predictive envelope and one simulated series"},
      {"sensitivity", "refit and resample on truncated series for each cutoff"},
  };
  for (const auto& [name, help] : commands) add_common(*app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kUsage;
  }

  std::string command = app.get_subcommands().front()->get_name();
  layoffcast::RunConfig cfg;
  try {
    if (!flags.config.empty()) layoffcast::merge_config_file(cfg, flags.config);
    layoffcast::apply_environment(cfg);
    apply_flags(cfg, flags);
  } catch (const layoffcast::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return cli::kIo;
  } catch (const layoffcast::Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return cli::kUsage;
  }
  return cli::run_command(command, cfg, std::cout, std::cerr);
}
