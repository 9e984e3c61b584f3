#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "layoffcast/errors.hpp"
#include "layoffcast/inference.hpp"

namespace layoffcast {

PipelineResult fit_and_sample(const WeeklySeries& series, const FullParams& init,
                              const MleOptions& mle, const McmcConfig& mcmc,
                              double level) {
  PipelineResult out;
  out.mle = mle_fit(series, init, mle);
  out.chain = mh_sample(series, out.mle.params, mcmc);
  out.interval = credible_interval(out.chain, level);
  return out;
}

namespace {

SensitivityEntry run_cutoff(const WeeklySeries& series, int cutoff,
                            const SensitivityConfig& config) {
  SensitivityEntry entry;
  entry.cutoff = cutoff;
  try {
    if (cutoff < 10) {
      std::ostringstream os;
      os << "cutoff " << cutoff << " is below the 10-week minimum";
      throw PreconditionError(os.str());
    }
    if (static_cast<std::size_t>(cutoff) > series.size()) {
      std::ostringstream os;
      os << "cutoff " << cutoff << " exceeds series length " << series.size();
      throw PreconditionError(os.str());
    }
    WeeklySeries part = series.truncated(static_cast<std::size_t>(cutoff));
    FullParams init = config.init ? *config.init : default_init(part);
    McmcConfig mcmc = config.mcmc;
    mcmc.seed = config.mcmc.seed + static_cast<std::uint64_t>(cutoff);
    PipelineResult res = fit_and_sample(part, init, config.mle, mcmc, config.level);
    entry.interval = res.interval;
    entry.mle = res.mle.params;
    entry.censored_fraction = res.chain.censored_fraction();
  } catch (const std::exception& e) {
    entry.error = e.what();
  }
  return entry;
}

}  // namespace

std::vector<SensitivityEntry> sensitivity_scan(const WeeklySeries& series,
                                               std::span<const int> cutoffs,
                                               const SensitivityConfig& config) {
  std::vector<SensitivityEntry> out(cutoffs.size());
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads) : hw;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cutoffs.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < cutoffs.size(); idx = next++)
      out[idx] = run_cutoff(series, cutoffs[idx], config);
  };
  if (threads <= 1) {
    worker();
    return out;
  }
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return out;
}

}  // namespace layoffcast
