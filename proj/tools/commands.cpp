#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include "layoffcast/dataio.hpp"
#include "layoffcast/errors.hpp"
#include "layoffcast/inference.hpp"
#include "layoffcast/io.hpp"
#include "layoffcast/simulate.hpp"

namespace layoffcast::cli {

namespace {

namespace fs = std::filesystem;

std::string in_out_dir(const RunConfig& cfg, const char* name) {
  return (fs::path(cfg.out_dir) / name).string();
}

std::string series_path(const RunConfig& cfg) {
  return cfg.series.empty() ? in_out_dir(cfg, kSeriesFile) : cfg.series;
}

std::string params_path(const RunConfig& cfg) {
  return cfg.params.empty() ? in_out_dir(cfg, kParamsFile) : cfg.params;
}

std::string chain_path(const RunConfig& cfg) {
  return cfg.chain.empty() ? in_out_dir(cfg, kChainFile) : cfg.chain;
}

double baseline_of(const RunConfig& cfg) {
  return cfg.baseline_override.value_or(kPaperBaseline);
}

MleOptions mle_options(const RunConfig& cfg) {
  MleOptions o;
  o.variant = cfg.variant;
  o.box = cfg.priors;
  o.dt = cfg.dt;
  return o;
}

McmcConfig mcmc_config(const RunConfig& cfg) {
  McmcConfig m;
  m.iterations = cfg.iterations;
  m.burn_in = cfg.burn_in;
  m.seed = cfg.seed;
  m.baseline = baseline_of(cfg);
  m.horizon = cfg.horizon;
  m.variant = cfg.variant;
  m.box = cfg.priors;
  m.dt = cfg.dt;
  return m;
}

FullParams init_for(const RunConfig& cfg, const WeeklySeries& series) {
  if (!cfg.init) return default_init(series);
  const FullParams& p = *cfg.init;
  p.epidemic.validate();
  p.obs.validate();
  return p;
}

std::string date_of(int t) { return format_date(week_to_date(t)); }

}  // namespace

void cmd_aggregate(const RunConfig& cfg, std::ostream& log) {
  if (cfg.input.empty()) throw PreconditionError("aggregate needs --input");
  ParsedEvents parsed = parse_events_file(cfg.input);

  int to = cfg.from_week;
  if (cfg.to_week) {
    to = *cfg.to_week;
  } else {
    for (const auto& ev : parsed.events) to = std::max(to, date_to_week(ev.date));
  }
  WeeklySeries series = aggregate_weekly(parsed.events, cfg.from_week, to, cfg.count_mode);
  double baseline = baseline_2021(parsed.events);

  std::ostringstream csv;
  write_series_csv(csv, series);

  KeyValues summary;
  summary["total_events"] = std::to_string(parsed.events.size());
  summary["skipped_rows"] = std::to_string(parsed.skipped.size());
  summary["baseline_2021"] = format_double(baseline);
  summary["from_week"] = std::to_string(cfg.from_week);
  summary["to_week"] = std::to_string(to);
  summary["weeks"] = std::to_string(series.size());
  summary["count_mode"] = cfg.count_mode == CountMode::per_event ? "per_event" : "per_company_week";
  std::int64_t in_range = 0;
  for (auto c : series.counts) in_range += c;
  summary["events_in_range"] = std::to_string(in_range);
  std::ostringstream skips;
  for (const auto& s : parsed.skipped) skips << "# skipped line " << s.line << ": " << s.reason << '\n';

  write_file_atomic(series_path(cfg), csv.str());
  write_file_atomic(in_out_dir(cfg, kSummaryFile), format_key_values(summary) + skips.str());
  log << "aggregated " << parsed.events.size() << " events (" << parsed.skipped.size()
      << " skipped) into " << series.size() << " weeks; 2021 baseline "
      << format_double(baseline) << '\n';
}

void cmd_fit(const RunConfig& cfg, std::ostream& log) {
  WeeklySeries series = read_series_file(series_path(cfg));
  KeyValues extra;
  extra["weeks"] = std::to_string(series.size());
  extra["variant"] = std::string(variant_name(cfg.variant));

  FullParams fitted;
  double ll = 0.0;
  if (cfg.no_optimize) {
    if (!cfg.init) throw PreconditionError("--no-optimize requires init_* parameters");
    fitted = init_for(cfg, series);
    ll = box_log_likelihood(fitted, series, cfg.variant, cfg.priors, cfg.dt);
    extra["optimized"] = "false";
  } else {
    FullParams init = init_for(cfg, series);
    MleResult res = mle_fit(series, init, mle_options(cfg));
    fitted = res.params;
    ll = res.log_likelihood;
    extra["optimized"] = "true";
    extra["evaluations"] = std::to_string(res.evaluations);
    extra["init_log_likelihood"] = format_double(res.init_log_likelihood);
  }
  extra["log_likelihood"] = format_double(ll);
  write_file_atomic(params_path(cfg), format_params(fitted, extra));
  log << "fit: j0=" << fitted.epidemic.j0 << " k=" << fitted.epidemic.k
      << " N=" << fitted.epidemic.n_pop << " alpha=" << fitted.obs.alpha
      << " beta=" << fitted.obs.beta << " loglik=" << ll << '\n';
}

void cmd_sample(const RunConfig& cfg, std::ostream& log) {
  WeeklySeries series = read_series_file(series_path(cfg));
  FullParams start = read_params_file(params_path(cfg));
  PosteriorChain chain = mh_sample(series, start, mcmc_config(cfg));
  write_file_atomic(chain_path(cfg), format_chain_csv(chain));
  log << "sampled " << chain.size() << " draws, acceptance " << chain.acceptance_rate << '\n';
}

void cmd_forecast(const RunConfig& cfg, std::ostream& log) {
  const double baseline = baseline_of(cfg);
  KeyValues out;
  out["baseline"] = format_double(baseline);
  out["level"] = format_double(cfg.level);

  std::string notes;
  const std::string cpath = chain_path(cfg);
  const std::string ppath = params_path(cfg);
  const bool have_params = fs::exists(ppath);

  if (have_params) {
    FullParams p = read_params_file(ppath);
    TEndResult r = t_end_scan(p.epidemic, p.obs, baseline, cfg.horizon, cfg.dt);
    out["t_end_fitted"] = std::to_string(r.t_end);
    out["t_end_fitted_date"] = date_of(r.t_end);
    out["t_peak_fitted"] = std::to_string(r.t_peak);
    out["t_end_fitted_censored"] = r.censored ? "true" : "false";
    if (!r.censored && r.t_end == r.t_peak)
      notes += "# note: baseline is above the expected count at the peak; t_end equals the peak week\n";
  }

  if (fs::exists(cpath)) {
    PosteriorChain chain = read_chain_file(cpath);
    if (chain.draws.empty()) throw EmptyInputError("chain file has no draws");
    if (chain.t_end_draws.size() != chain.draws.size() || chain.baseline != baseline ||
        chain.horizon != cfg.horizon) {
      chain.baseline = baseline;
      chain.horizon = cfg.horizon;
      compute_t_end_draws(chain, cfg.dt);
    }
    CredibleInterval ci = credible_interval(chain, cfg.level);
    int point = point_t_end(chain);
    double censored = chain.censored_fraction();
    out["draws"] = std::to_string(chain.size());
    out["t_end_point"] = std::to_string(point);
    out["t_end_point_date"] = date_of(point);
    out["ci_lo"] = std::to_string(ci.lo);
    out["ci_hi"] = std::to_string(ci.hi);
    out["ci_lo_date"] = date_of(ci.lo);
    out["ci_hi_date"] = date_of(ci.hi);
    out["censored_fraction"] = format_double(censored);
    if (censored > 0.10) {
      out["warning"] = "more than 10% of draws never fall below the baseline within the horizon";
      log << "warning: censored fraction " << censored << " exceeds 10%\n";
    }
    if (notes.empty()) {
      std::vector<EpidemicParams> ep;
      std::vector<ObservationParams> ob;
      for (const auto& d : chain.draws) {
        ep.push_back(d.epidemic);
        ob.push_back(d.obs);
      }
      auto scans = t_end_scan_batch(ep, ob, baseline, cfg.horizon, cfg.dt);
      bool all_peak = std::all_of(scans.begin(), scans.end(), [](const TEndResult& r) {
        return !r.censored && r.t_end == r.t_peak;
      });
      if (all_peak)
        notes += "# note: baseline is above the expected count at the peak; t_end equals the peak week\n";
    }

    std::map<int, int> hist;
    for (int t : chain.t_end_draws) ++hist[t];
    std::ostringstream h;
    h << "t_end,week_start_date,count\n";
    for (auto [t, n] : hist) h << t << ',' << date_of(t) << ',' << n << '\n';
    write_file_atomic(in_out_dir(cfg, kHistogramFile), h.str());
    log << "t_end " << cfg.level * 100 << "% interval [" << ci.lo << ", " << ci.hi << "] = "
        << date_of(ci.lo) << " .. " << date_of(ci.hi) << '\n';
  } else if (!have_params) {
    throw IoError("forecast needs a chain (" + cpath + ") or parameters (" + ppath + ")");
  } else {
    // Parameters only: the interval collapses to the point estimate.
    out["ci_lo"] = out["t_end_fitted"];
    out["ci_hi"] = out["t_end_fitted"];
    out["ci_lo_date"] = out["t_end_fitted_date"];
    out["ci_hi_date"] = out["t_end_fitted_date"];
    log << "t_end (fitted parameters) " << out["t_end_fitted"] << " = "
        << out["t_end_fitted_date"] << '\n';
  }
  write_file_atomic(in_out_dir(cfg, kForecastFile), format_key_values(out) + notes);
}

void cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  FullParams p = read_params_file(params_path(cfg));
  int weeks = 65;
  if (cfg.sim_weeks) {
    weeks = *cfg.sim_weeks;
  } else if (fs::exists(series_path(cfg))) {
    weeks = static_cast<int>(read_series_file(series_path(cfg)).size());
  }
  Envelope env = predictive_envelope(p, weeks, cfg.n_sims, cfg.level, cfg.seed, cfg.dt);
  WeeklySeries sample = simulate_series(
      p, weeks, replicate_seed(cfg.seed, static_cast<std::uint64_t>(cfg.n_sims)), cfg.dt);

  std::ostringstream env_csv, sample_csv;
  write_envelope_csv(env_csv, env);
  write_series_csv(sample_csv, sample);
  write_file_atomic(in_out_dir(cfg, kEnvelopeFile), env_csv.str());
  write_file_atomic(in_out_dir(cfg, kSampleSeriesFile), sample_csv.str());
  log << "simulated " << cfg.n_sims << " series of " << weeks << " weeks\n";
}

void cmd_sensitivity(const RunConfig& cfg, std::ostream& log) {
  WeeklySeries series = read_series_file(series_path(cfg));
  if (cfg.cutoffs.empty()) throw PreconditionError("sensitivity needs --cutoffs");
  SensitivityConfig sc;
  sc.mcmc = mcmc_config(cfg);
  sc.mle = mle_options(cfg);
  sc.init = cfg.init;
  sc.level = cfg.level;
  sc.threads = cfg.threads;
  auto entries = sensitivity_scan(series, cfg.cutoffs, sc);

  std::ostringstream csv;
  csv << "cutoff,lo,hi,lo_date,hi_date,censored_fraction,error\n";
  for (const auto& e : entries) {
    csv << e.cutoff << ',';
    if (e.interval) {
      csv << e.interval->lo << ',' << e.interval->hi << ',' << date_of(e.interval->lo) << ','
          << date_of(e.interval->hi) << ',' << format_double(e.censored_fraction) << ',';
    } else {
      csv << ",,,,,";
    }
    std::string err = e.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    csv << (err.empty() ? "" : "\"" + err + "\"") << '\n';
  }
  write_file_atomic(in_out_dir(cfg, kSensitivityFile), csv.str());
  std::size_t failed = static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return !e.error.empty(); }));
  log << "sensitivity: " << entries.size() << " cutoffs, " << failed << " failed\n";
}

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log,
                std::ostream& err) {
  static const std::map<std::string, void (*)(const RunConfig&, std::ostream&)> table = {
      {"aggregate", cmd_aggregate}, {"fit", cmd_fit},           {"sample", cmd_sample},
      {"forecast", cmd_forecast},   {"simulate", cmd_simulate}, {"sensitivity", cmd_sensitivity},
  };
  auto it = table.find(command);
  if (it == table.end()) {
    err << "unknown command '" << command << "'\n";
    return kUsage;
  }
  try {
    it->second(cfg, log);
    return kOk;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return kFormat;
  } catch (const ConvergenceError& e) {
    err << "convergence error: " << e.what() << '\n';
    return kConvergence;
  } catch (const DegenerateFitError& e) {
    err << "degenerate fit: " << e.what() << '\n';
    return kDegenerate;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::exception& e) {
    err << "unexpected error: " << e.what() << '\n';
    return kGeneric;
  }
}

}  // namespace layoffcast::cli
