#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "layoffcast/errors.hpp"
#include "layoffcast/inference.hpp"

namespace layoffcast {

namespace {

// Chunk size for batched t_end; a multiple of every SIMD width.
constexpr std::size_t kTEndChunk = 256;

bool is_epidemic_coord(std::size_t c) { return c < 3; }

// Current point of the chain with its cached curve, so proposals that move
// only alpha or beta skip the ODE solve.
struct ChainPoint {
  Coords u;
  FullParams params;
  std::shared_ptr<const EpidemicCurve> curve;
  double loglik = kLogZero;
  double log_target = kLogZero;
};

class Target {
 public:
  Target(const WeeklySeries& series, const McmcConfig& config, double delta)
      : series_(series), config_(config), delta_(delta),
        horizon_(std::max<double>(1.0, static_cast<double>(series.size() - 1))) {}

  // Evaluates u; `reuse` supplies a curve for unchanged epidemic parameters.
  ChainPoint evaluate(const Coords& u, std::shared_ptr<const EpidemicCurve> reuse) const {
    ChainPoint pt;
    pt.u = u;
    pt.params = from_coords(u, delta_);
    snap_to_box(pt.params, config_.box);
    if (!config_.box.contains(pt.params)) return pt;
    try {
      if (reuse) {
        pt.curve = std::move(reuse);
      } else {
        pt.curve = std::make_shared<const EpidemicCurve>(
            integrate_sir(pt.params.epidemic, horizon_, config_.dt));
      }
      pt.loglik = log_likelihood(*pt.curve, pt.params.obs, series_, config_.variant);
    } catch (const ParameterDomainError&) {
      pt.loglik = kLogZero;
    }
    if (pt.loglik != kLogZero) pt.log_target = pt.loglik + log_jacobian(u);
    return pt;
  }

 private:
  const WeeklySeries& series_;
  const McmcConfig& config_;
  double delta_;
  double horizon_;
};

}  // namespace

double PosteriorChain::censored_fraction() const {
  if (censored.empty()) return 0.0;
  auto n = std::count(censored.begin(), censored.end(), std::uint8_t{1});
  return static_cast<double>(n) / static_cast<double>(censored.size());
}

PosteriorChain mh_sample(const WeeklySeries& series, const FullParams& init,
                         const McmcConfig& config) {
  if (series.empty()) throw EmptyInputError("mh_sample: empty series");
  if (config.iterations < 1) throw PreconditionError("mh_sample: iterations must be >= 1");
  if (config.burn_in < 0) throw PreconditionError("mh_sample: burn_in must be >= 0");

  const double delta = init.epidemic.delta;
  Target target(series, config, delta);

  ChainPoint cur = target.evaluate(to_coords(init), nullptr);
  if (cur.log_target == kLogZero)
    throw InvalidStartError("mh_sample: initial point has zero posterior density");
  // The retained draws report init verbatim until the first accepted move.
  cur.params = init;

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Coords scale = config.proposal_scale;
  std::array<int, kParamDim> window_accepts{};
  std::array<int, kParamDim> window_props{};
  long long accepted = 0;
  long long proposed = 0;

  PosteriorChain chain;
  chain.seed = config.seed;
  chain.burn_in = config.burn_in;
  chain.baseline = config.baseline;
  chain.horizon = config.horizon;
  chain.draws.reserve(static_cast<std::size_t>(config.iterations));
  chain.log_likelihood.reserve(static_cast<std::size_t>(config.iterations));

  const int total = config.burn_in + config.iterations;
  for (int it = 0; it < total; ++it) {
    const bool burning = it < config.burn_in;
    for (std::size_t c = 0; c < kParamDim; ++c) {
      if (!config.free[c]) continue;
      Coords u = cur.u;
      u[c] += scale[c] * normal(rng);
      ChainPoint prop = target.evaluate(u, is_epidemic_coord(c) ? nullptr : cur.curve);
      double log_u = std::log(uniform(rng));
      bool accept = prop.log_target != kLogZero && log_u <= prop.log_target - cur.log_target;
      // A zero-length move keeps the current parameters bit for bit.
      if (accept && prop.u != cur.u) cur = std::move(prop);
      if (burning) {
        ++window_props[c];
        if (accept) ++window_accepts[c];
      } else {
        ++proposed;
        if (accept) ++accepted;
      }
    }

    if (burning && config.adapt && (it + 1) % config.adapt_interval == 0) {
      const double mid = 0.5 * (config.target_accept_lo + config.target_accept_hi);
      for (std::size_t c = 0; c < kParamDim; ++c) {
        if (window_props[c] == 0) continue;
        double rate = static_cast<double>(window_accepts[c]) / window_props[c];
        if (rate < config.target_accept_lo || rate > config.target_accept_hi)
          scale[c] *= std::exp(3.0 * (rate - mid));
        window_props[c] = 0;
        window_accepts[c] = 0;
      }
    }

    if (!burning) {
      chain.draws.push_back(cur.params);
      chain.log_likelihood.push_back(cur.loglik);
    }
  }

  chain.acceptance_rate =
      proposed == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  chain.final_scale = scale;
  compute_t_end_draws(chain, config.dt);
  return chain;
}

void compute_t_end_draws(PosteriorChain& chain, double dt) {
  const std::size_t n = chain.draws.size();
  chain.t_end_draws.assign(n, 0);
  chain.censored.assign(n, 0);
  std::vector<EpidemicParams> ep;
  std::vector<ObservationParams> obs;
  for (std::size_t start = 0; start < n; start += kTEndChunk) {
    std::size_t end = std::min(n, start + kTEndChunk);
    ep.clear();
    obs.clear();
    for (std::size_t d = start; d < end; ++d) {
      ep.push_back(chain.draws[d].epidemic);
      obs.push_back(chain.draws[d].obs);
    }
    auto res = t_end_scan_batch(ep, obs, chain.baseline, chain.horizon, dt);
    for (std::size_t d = start; d < end; ++d) {
      chain.t_end_draws[d] = res[d - start].t_end;
      chain.censored[d] = res[d - start].censored ? 1 : 0;
    }
  }
}

}  // namespace layoffcast
