#pragma once

#include <iosfwd>
#include <string>

#include "layoffcast/config.hpp"

namespace layoffcast::cli {

enum ExitCode : int {
  kOk = 0,
  kGeneric = 1,
  kUsage = 2,
  kIo = 3,
  kFormat = 4,
  kConvergence = 5,
  kDegenerate = 6,
  kDomain = 7,
};

// Default file names inside out_dir.
inline constexpr const char* kSeriesFile = "series.csv";
inline constexpr const char* kSummaryFile = "aggregate_summary.txt";
inline constexpr const char* kParamsFile = "params.txt";
inline constexpr const char* kChainFile = "chain.csv";
inline constexpr const char* kForecastFile = "forecast.txt";
inline constexpr const char* kHistogramFile = "forecast_histogram.csv";
inline constexpr const char* kEnvelopeFile = "envelope.csv";
inline constexpr const char* kSampleSeriesFile = "sample_series.csv";
inline constexpr const char* kSensitivityFile = "sensitivity.csv";

// Each command reads and writes files as described in the README and prints
// a short human-readable summary to `log`. Errors propagate as exceptions.
void cmd_aggregate(const RunConfig& cfg, std::ostream& log);
void cmd_fit(const RunConfig& cfg, std::ostream& log);
void cmd_sample(const RunConfig& cfg, std::ostream& log);
void cmd_forecast(const RunConfig& cfg, std::ostream& log);
void cmd_simulate(const RunConfig& cfg, std::ostream& log);
void cmd_sensitivity(const RunConfig& cfg, std::ostream& log);

// Runs `command` and maps exceptions to exit codes, reporting on `err`.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log,
                std::ostream& err);

}  // namespace layoffcast::cli
