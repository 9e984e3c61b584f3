#include "layoffcast/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "layoffcast/errors.hpp"

namespace layoffcast {

namespace {

// splitmix64 finaliser; decorrelates consecutive replicate indices.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double sample_beta(std::mt19937_64& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  double x = ga(rng);
  double y = gb(rng);
  double sum = x + y;
  // Both gammas can underflow to 0 for tiny shapes; fall back to the mean.
  return sum > 0.0 ? x / sum : a / (a + b);
}

std::int64_t sample_count(std::mt19937_64& rng, double n_real, const ObservationParams& obs) {
  double p = sample_beta(rng, obs.alpha, obs.beta);
  auto trials = static_cast<std::int64_t>(std::llround(std::max(0.0, n_real)));
  if (trials == 0) return 0;
  std::binomial_distribution<std::int64_t> binom(trials, std::clamp(p, 0.0, 1.0));
  return binom(rng);
}

double quantile_level_check(double level) {
  if (!(level >= 0.0 && level <= 1.0)) {
    std::ostringstream os;
    os << "envelope level must lie in [0,1], got " << level;
    throw ParameterDomainError(os.str());
  }
  return 0.5 * (1.0 - level);
}

std::size_t inverse_cdf_index(double p, std::size_t n) {
  double pos = std::ceil(p * static_cast<double>(n) - 1e-9) - 1.0;
  pos = std::clamp(pos, 0.0, static_cast<double>(n - 1));
  return static_cast<std::size_t>(pos);
}

}  // namespace

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t index) {
  return mix(mix(seed) ^ index);
}

WeeklySeries simulate_series(const EpidemicCurve& curve, const ObservationParams& obs,
                             int weeks, std::uint64_t seed) {
  obs.validate();
  if (weeks < 1) throw PreconditionError("simulate_series: weeks must be >= 1");
  std::mt19937_64 rng(seed);
  WeeklySeries out;
  out.counts.reserve(static_cast<std::size_t>(weeks));
  const double n_pop = curve.params().n_pop;
  for (int t = 0; t < weeks; ++t)
    out.counts.push_back(sample_count(rng, n_pop * j_at(curve, t), obs));
  return out;
}

WeeklySeries simulate_series(const FullParams& params, int weeks, std::uint64_t seed,
                             double dt) {
  if (weeks < 1) throw PreconditionError("simulate_series: weeks must be >= 1");
  EpidemicCurve curve = integrate_sir(params.epidemic, std::max(1, weeks - 1), dt);
  return simulate_series(curve, params.obs, weeks, seed);
}

Envelope predictive_envelope(const FullParams& params, int weeks, int n_sims, double level,
                             std::uint64_t seed, double dt) {
  if (n_sims < 100) throw PreconditionError("predictive_envelope: n_sims must be >= 100");
  const double tail = quantile_level_check(level);
  if (weeks < 1) throw PreconditionError("predictive_envelope: weeks must be >= 1");

  EpidemicCurve curve = integrate_sir(params.epidemic, std::max(1, weeks - 1), dt);
  // sims[t][r]
  std::vector<std::vector<std::int64_t>> sims(static_cast<std::size_t>(weeks),
                                              std::vector<std::int64_t>(static_cast<std::size_t>(n_sims)));
  for (int r = 0; r < n_sims; ++r) {
    WeeklySeries s = simulate_series(curve, params.obs, weeks,
                                     replicate_seed(seed, static_cast<std::uint64_t>(r)));
    for (int t = 0; t < weeks; ++t)
      sims[static_cast<std::size_t>(t)][static_cast<std::size_t>(r)] = s.counts[static_cast<std::size_t>(t)];
  }

  Envelope env;
  env.level = level;
  env.lo.resize(static_cast<std::size_t>(weeks));
  env.hi.resize(static_cast<std::size_t>(weeks));
  const auto n = static_cast<std::size_t>(n_sims);
  for (std::size_t t = 0; t < sims.size(); ++t) {
    auto& col = sims[t];
    std::sort(col.begin(), col.end());
    env.lo[t] = col[inverse_cdf_index(tail, n)];
    env.hi[t] = col[inverse_cdf_index(1.0 - tail, n)];
  }
  return env;
}

void write_envelope_csv(std::ostream& out, const Envelope& env, int start_week) {
  out << "week_index,lo,hi\n";
  for (std::size_t t = 0; t < env.size(); ++t)
    out << start_week + static_cast<int>(t) << ',' << env.lo[t] << ',' << env.hi[t] << '\n';
}

}  // namespace layoffcast
