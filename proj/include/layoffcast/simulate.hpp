#pragma once
// Synthetic reporting series and posterior-predictive envelopes.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "layoffcast/inference.hpp"

namespace layoffcast {

// Weeks t = 0..horizon-1: p(t) ~ Beta(alpha, beta) via two gamma draws, then
// x(t) ~ Binomial(round(N j(t)), p(t)). Deterministic given the seed.
WeeklySeries simulate_series(const FullParams& params, int weeks, std::uint64_t seed,
                             double dt = kDefaultDt);

// Same draws on a precomputed curve (horizon >= weeks - 1).
WeeklySeries simulate_series(const EpidemicCurve& curve, const ObservationParams& obs,
                             int weeks, std::uint64_t seed);

// Seed of replicate `index` under base seed `seed`; independent of the order
// in which replicates run.
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t index);

struct Envelope {
  double level = 0.95;
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> hi;

  std::size_t size() const { return lo.size(); }
};

// Per-week equal-tailed quantiles over n_sims simulated series (n_sims >= 100).
Envelope predictive_envelope(const FullParams& params, int weeks, int n_sims, double level,
                             std::uint64_t seed, double dt = kDefaultDt);

// Envelope CSV: week_index,lo,hi
void write_envelope_csv(std::ostream& out, const Envelope& env, int start_week = 0);

}  // namespace layoffcast
