#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "layoffcast/errors.hpp"
#include "layoffcast/inference.hpp"
#include "layoffcast/nelder_mead.hpp"

namespace layoffcast {

namespace {

constexpr double kMinProb = 1e-12;

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void check_series(const WeeklySeries& series, int min_weeks) {
  if (static_cast<int>(series.size()) < min_weeks) {
    std::ostringstream os;
    os << "fit needs at least " << min_weeks << " weeks, series has " << series.size();
    throw PreconditionError(os.str());
  }
  bool any = std::any_of(series.counts.begin(), series.counts.end(),
                         [](std::int64_t c) { return c > 0; });
  if (!any) throw DegenerateFitError("all-zero series: the likelihood has no interior maximum");
}

}  // namespace

bool PriorBox::contains(const FullParams& p) const {
  const auto& e = p.epidemic;
  return e.j0 >= j0_lo && e.j0 <= j0_hi && e.k >= k_lo && e.k <= k_hi &&
         e.n_pop >= n_lo && e.n_pop <= n_hi && p.obs.alpha >= alpha_lo &&
         p.obs.alpha <= alpha_hi && p.obs.beta >= beta_lo && p.obs.beta <= beta_hi;
}

Coords to_coords(const FullParams& p) {
  double k = std::clamp(p.epidemic.k, kMinProb, 1.0 - kMinProb);
  return Coords{std::log(p.epidemic.j0), std::log(k) - std::log1p(-k),
                std::log(p.epidemic.n_pop), std::log(p.obs.alpha),
                std::log(p.obs.beta)};
}

FullParams from_coords(const Coords& u, double delta) {
  FullParams p;
  p.epidemic.j0 = std::exp(u[0]);
  p.epidemic.k = 1.0 / (1.0 + std::exp(-u[1]));
  p.epidemic.n_pop = std::exp(u[2]);
  p.epidemic.delta = delta;
  p.obs.alpha = std::exp(u[3]);
  p.obs.beta = std::exp(u[4]);
  return p;
}

namespace {

void snap(double& v, double lo, double hi) {
  constexpr double kRel = 1e-12;
  if (v < lo && lo - v <= kRel * std::abs(lo)) v = lo;
  if (v > hi && v - hi <= kRel * std::abs(hi)) v = hi;
}

}  // namespace

void snap_to_box(FullParams& p, const PriorBox& box) {
  snap(p.epidemic.j0, box.j0_lo, box.j0_hi);
  snap(p.epidemic.k, box.k_lo, box.k_hi);
  snap(p.epidemic.n_pop, box.n_lo, box.n_hi);
  snap(p.obs.alpha, box.alpha_lo, box.alpha_hi);
  snap(p.obs.beta, box.beta_lo, box.beta_hi);
}

double log_jacobian(const Coords& u) {
  // d k / d logit = k (1 - k)
  double log_dk = -softplus(-u[1]) - softplus(u[1]);
  return u[0] + log_dk + u[2] + u[3] + u[4];
}

double box_log_likelihood(const FullParams& p, const WeeklySeries& series,
                          Variant variant, const PriorBox& box, double dt) {
  if (!box.contains(p)) return kLogZero;
  try {
    return log_likelihood(p.epidemic, p.obs, series, variant, dt);
  } catch (const ParameterDomainError&) {
    return kLogZero;
  }
}

FullParams default_init(const WeeklySeries& series) {
  if (series.empty()) throw EmptyInputError("default_init: empty series");
  const double total = std::accumulate(series.counts.begin(), series.counts.end(), 0.0);
  if (!(total > 0.0)) throw DegenerateFitError("all-zero series: no starting point");

  // Coarse grid over the shape parameters; N is set from the total count and
  // then raised until every observation is inside the support.
  const double horizon = std::max<double>(1.0, static_cast<double>(series.size() - 1));
  ObservationParams obs{1.0, 4.0};
  FullParams best;
  double best_ll = kLogZero;
  bool have = false;
  for (double k : {0.5, 0.6, 0.7, 0.8, 0.9, 0.95}) {
    for (int e = -10; e <= -2; ++e) {
      EpidemicParams ep{std::pow(10.0, 0.5 * e), k, 1.0, 1.0};
      EpidemicCurve curve = integrate_sir(ep, horizon);
      double sum_j = 0.0;
      double need = 0.0;
      for (std::size_t t = 0; t < series.size(); ++t) {
        double j = j_at(curve, static_cast<double>(t));
        sum_j += j;
        if (series.counts[t] > 0)
          need = std::max(need, static_cast<double>(series.counts[t]) / std::max(j, 1e-300));
      }
      ep.n_pop = std::max(total / (obs.mean() * sum_j), 1.05 * need);
      FullParams cand{ep, obs};
      PriorBox box;
      double ll = box_log_likelihood(cand, series, Variant::snapshot, box);
      if (!have || ll > best_ll) {
        best = cand;
        best_ll = ll;
        have = true;
      }
    }
  }
  return best;
}

MleResult mle_fit(const WeeklySeries& series, const FullParams& init,
                  const MleOptions& options) {
  check_series(series, options.min_weeks);
  if (!options.box.contains(init)) throw PreconditionError("mle_fit: init outside the prior box");

  const double delta = init.epidemic.delta;
  auto loglik = [&](const FullParams& p) {
    return box_log_likelihood(p, series, options.variant, options.box, options.dt);
  };

  MleResult out;
  out.init_log_likelihood = loglik(init);
  if (out.init_log_likelihood == kLogZero)
    throw InvalidStartError("mle_fit: init has zero likelihood (counts exceed N*j(t))");

  auto objective = [&](std::span<const double> x) {
    Coords u;
    std::copy(x.begin(), x.end(), u.begin());
    FullParams p = from_coords(u, delta);
    snap_to_box(p, options.box);
    double ll = loglik(p);
    return ll == kLogZero ? std::numeric_limits<double>::infinity() : -ll;
  };

  NelderMeadOptions nm;
  nm.max_evaluations = options.max_evaluations;
  nm.f_tolerance = options.f_tolerance;
  nm.initial_step.assign(kParamDim, 0.5);

  Coords start = to_coords(init);
  out.params = init;
  out.log_likelihood = out.init_log_likelihood;

  for (int run = 0; run <= options.max_restarts; ++run) {
    NelderMeadResult res = nelder_mead(objective, start, nm);
    out.evaluations += res.evaluations;
    double ll = -res.f;
    // Gains below the tolerance are noise; keeping the incumbent makes a
    // local maximum a fixed point.
    bool improved = ll > out.log_likelihood + options.f_tolerance;
    if (improved) {
      std::copy(res.x.begin(), res.x.end(), start.begin());
      out.params = from_coords(start, delta);
      snap_to_box(out.params, options.box);
      out.log_likelihood = ll;
    }
    if (!res.converged) {
      std::ostringstream os;
      os << "Nelder-Mead did not converge within " << options.max_evaluations
         << " evaluations (best log-likelihood " << out.log_likelihood << ")";
      throw ConvergenceError(os.str(), std::vector<double>(start.begin(), start.end()),
                             out.log_likelihood);
    }
    if (!improved) break;
    // Later restarts use a smaller simplex around the incumbent.
    for (double& s : nm.initial_step) s = std::max(0.05, 0.5 * s);
  }
  return out;
}

}  // namespace layoffcast
