#pragma once
// Run configuration as a flat `key = value` document.
//
// Layering, lowest to highest precedence: built-in defaults, the config file,
// LAYOFFCAST_<KEY> environment variables, command-line flags.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "layoffcast/betabinom.hpp"
#include "layoffcast/dataio.hpp"
#include "layoffcast/inference.hpp"

namespace layoffcast {

inline constexpr const char* kEnvPrefix = "LAYOFFCAST_";

struct RunConfig {
  std::uint64_t seed = 20230331;
  int iterations = 1000;
  int burn_in = 1000;
  double dt = kDefaultDt;
  double horizon = 300.0;  // weeks scanned for t_end
  std::optional<double> baseline_override;
  PriorBox priors;
  Variant variant = Variant::snapshot;
  double level = 0.95;

  // aggregate
  int from_week = 0;
  std::optional<int> to_week;  // default: week of the latest event
  CountMode count_mode = CountMode::per_event;

  // fit
  std::optional<FullParams> init;
  bool no_optimize = false;

  // simulate
  int n_sims = 2000;
  std::optional<int> sim_weeks;  // default: series length

  // sensitivity
  std::vector<int> cutoffs;
  int threads = 0;

  // paths
  std::string input;
  std::string series;  // weekly series CSV
  std::string params;  // fitted parameter file
  std::string chain;   // posterior chain CSV
  std::string out_dir = ".";

  bool operator==(const RunConfig&) const = default;
};

// Applies one key/value; throws FormatError on unknown keys or bad values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

RunConfig parse_config(std::istream& in);
RunConfig load_config_file(const std::string& path);
// Reads a file into an existing config (file keys override current values).
void merge_config_file(RunConfig& cfg, const std::string& path);
// Applies every LAYOFFCAST_<KEY> variable present in the environment.
void apply_environment(RunConfig& cfg);

// Lossless text form; parse_config(write_config(c)) == c.
std::string write_config(const RunConfig& cfg);

// "50..64", "50,52,60" or a mix such as "50..52,60".
std::vector<int> parse_cutoffs(const std::string& text);
std::string format_cutoffs(const std::vector<int>& cutoffs);

std::string format_double(double v);

}  // namespace layoffcast
