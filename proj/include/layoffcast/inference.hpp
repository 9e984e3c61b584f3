#pragma once
// Maximum likelihood, Metropolis-Hastings sampling under uniform priors,
// credible intervals for t_end and rolling-cutoff sensitivity scans.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "layoffcast/betabinom.hpp"
#include "layoffcast/sir.hpp"

namespace layoffcast {

struct FullParams {
  EpidemicParams epidemic;
  ObservationParams obs;

  bool operator==(const FullParams&) const = default;
};

// Uniform prior support on each parameter (closed box).
struct PriorBox {
  double j0_lo = 1e-6, j0_hi = 1.0;
  double k_lo = 0.0, k_hi = 1.0;
  double n_lo = 0.0, n_hi = 1e10;
  double alpha_lo = 0.0, alpha_hi = 1000.0;
  double beta_lo = 0.0, beta_hi = 1000.0;

  bool contains(const FullParams& p) const;
  bool operator==(const PriorBox&) const = default;
};

// Unconstrained coordinates: log j0, logit k, log N, log alpha, log beta.
inline constexpr std::size_t kParamDim = 5;
using Coords = std::array<double, kParamDim>;

Coords to_coords(const FullParams& p);
FullParams from_coords(const Coords& u, double delta = 1.0);
// Moves values that miss a box bound by rounding (relative 1e-12) onto the
// bound, so a bound value survives the round trip through Coords.
void snap_to_box(FullParams& p, const PriorBox& box);

// log |d(original)/d(coords)|; adding it turns a density that is uniform in
// the original parameters into the matching density on the coordinates.
double log_jacobian(const Coords& u);

// Log-likelihood that is -inf outside the prior box or the model's domain
// (j0 = 1 or k outside [0,1] included). Never throws for in-box parameters.
double box_log_likelihood(const FullParams& p, const WeeklySeries& series,
                          Variant variant, const PriorBox& box,
                          double dt = kDefaultDt);

// ---------------------------------------------------------------- MLE

struct MleOptions {
  Variant variant = Variant::snapshot;
  PriorBox box;
  int max_evaluations = 5000;
  double f_tolerance = 1e-8;
  // Nelder-Mead is restarted from its own optimum until a restart no longer
  // improves the log-likelihood by more than f_tolerance.
  int max_restarts = 4;
  double dt = kDefaultDt;
  int min_weeks = 10;
};

struct MleResult {
  FullParams params;
  double log_likelihood = 0.0;
  double init_log_likelihood = 0.0;
  int evaluations = 0;
};

// Box-constrained local maximiser of the log-likelihood via Nelder-Mead on
// Coords. Requires options.min_weeks weeks and a finite log-likelihood at
// init. Throws ConvergenceError if a Nelder-Mead run exhausts its budget.
MleResult mle_fit(const WeeklySeries& series, const FullParams& init,
                  const MleOptions& options = {});

// Heuristic starting point derived from the series (peak height and timing).
FullParams default_init(const WeeklySeries& series);

// ---------------------------------------------------------------- MCMC

struct McmcConfig {
  int iterations = 1000;  // retained draws
  int burn_in = 1000;
  std::uint64_t seed = 1;
  double baseline = kPaperBaseline;
  double horizon = 300.0;  // t_end horizon per draw
  Variant variant = Variant::snapshot;
  PriorBox box;
  double dt = kDefaultDt;
  // Initial random-walk standard deviations on the coordinates.
  Coords proposal_scale{0.1, 0.1, 0.1, 0.1, 0.1};
  // Scales are adapted during burn-in only, toward this acceptance window.
  bool adapt = true;
  double target_accept_lo = 0.2;
  double target_accept_hi = 0.4;
  int adapt_interval = 50;
  // Which coordinates are updated (others stay at init).
  std::array<bool, kParamDim> free{true, true, true, true, true};
};

struct PosteriorChain {
  std::vector<FullParams> draws;
  std::vector<int> t_end_draws;
  std::vector<std::uint8_t> censored;  // 1 when t_end hit the horizon
  std::vector<double> log_likelihood;
  double acceptance_rate = 0.0;
  std::uint64_t seed = 0;
  int burn_in = 0;
  double baseline = kPaperBaseline;
  double horizon = 300.0;
  Coords final_scale{};

  std::size_t size() const { return draws.size(); }
  double censored_fraction() const;
};

PosteriorChain mh_sample(const WeeklySeries& series, const FullParams& init,
                         const McmcConfig& config);

// Fills t_end_draws / censored for the chain's draws.
void compute_t_end_draws(PosteriorChain& chain, double dt = kDefaultDt);

// ---------------------------------------------------------------- intervals

struct CredibleInterval {
  int lo = 0;
  int hi = 0;
  double level = 0.95;

  bool overlaps(const CredibleInterval& other) const {
    return lo <= other.hi && other.lo <= hi;
  }
  bool contains(int t) const { return lo <= t && t <= hi; }
};

// Equal-tailed interval from the inverse empirical CDF; both endpoints are
// attained draws.
CredibleInterval credible_interval(std::span<const int> values, double level = 0.95);
CredibleInterval credible_interval(const PosteriorChain& chain, double level = 0.95);

// Median of the t_end draws (lower median for even counts).
int point_t_end(const PosteriorChain& chain);

// ---------------------------------------------------------------- sensitivity

struct SensitivityEntry {
  int cutoff = 0;
  std::optional<CredibleInterval> interval;
  std::optional<FullParams> mle;
  double censored_fraction = 0.0;
  std::string error;  // empty on success
};

struct SensitivityConfig {
  McmcConfig mcmc;
  MleOptions mle;
  std::optional<FullParams> init;  // default_init(series) when absent
  double level = 0.95;
  int threads = 0;  // 0: hardware concurrency
};

// Per cutoff c: truncate to the first c weeks, fit, sample with seed
// base_seed + c, and take the interval. Failures are recorded per entry.
std::vector<SensitivityEntry> sensitivity_scan(const WeeklySeries& series,
                                               std::span<const int> cutoffs,
                                               const SensitivityConfig& config);

// MLE followed by MLE-initialised sampling; what the scan runs per cutoff.
struct PipelineResult {
  MleResult mle;
  PosteriorChain chain;
  CredibleInterval interval;
};
PipelineResult fit_and_sample(const WeeklySeries& series, const FullParams& init,
                              const MleOptions& mle, const McmcConfig& mcmc,
                              double level = 0.95);

}  // namespace layoffcast
