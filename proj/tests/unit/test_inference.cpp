#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "layoffcast/errors.hpp"
#include "layoffcast/inference.hpp"
#include "layoffcast/simulate.hpp"

using namespace layoffcast;

namespace {

const FullParams kTruth{{0.00376, 0.899, 28261.0, 1.0}, {2.15, 2.92}};

// Batch-means standard error of the mean of a correlated series.
double batch_means_se(const std::vector<double>& v, std::size_t batches = 40) {
  std::size_t len = v.size() / batches;
  std::vector<double> means;
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += v[i];
    means.push_back(s / static_cast<double>(len));
  }
  double m = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(batches);
  double ss = 0.0;
  for (double x : means) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
}

// Single-week target with n = N j(0) = 40 * 0.5 * 0.5 = 10 exactly; only
// alpha and beta move, on the box [0, 10]^2.
struct ConjugateSetup {
  WeeklySeries series{0, {7}};
  FullParams init{{0.5, 0.5, 40.0, 1.0}, {2.0, 2.0}};
  McmcConfig cfg;
  ConjugateSetup() {
    cfg.iterations = 40000;
    cfg.burn_in = 2000;
    cfg.seed = 2024;
    cfg.horizon = 60.0;
    cfg.box.alpha_hi = 10.0;
    cfg.box.beta_hi = 10.0;
    cfg.free = {false, false, false, true, true};
    cfg.proposal_scale = {0.0, 0.0, 0.0, 0.8, 0.8};
  }
};

// Unnormalised posterior of (alpha, beta) under flat priors on [0, 10]^2.
double conjugate_density(double a, double b) {
  return std::exp(log_betabinom_pmf(7, 10.0, {a, b}));
}

template <class F>
double integrate_box(F f, double a_lo, double a_hi) {
  using boost::math::quadrature::gauss_kronrod;
  auto inner = [&](double a) {
    return gauss_kronrod<double, 61>::integrate([&](double b) { return f(a, b); }, 0.0, 10.0, 8,
                                                1e-12);
  };
  return gauss_kronrod<double, 61>::integrate(inner, a_lo, a_hi, 8, 1e-12);
}

}  // namespace

TEST_CASE("coordinate transform round-trips inside the box") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    FullParams p{{std::exp(std::log(1e-6) * u(rng)), 0.01 + 0.98 * u(rng), 1e-2 + 1e9 * u(rng), 1.0},
                 {1e-3 + 999 * u(rng), 1e-3 + 999 * u(rng)}};
    FullParams q = from_coords(to_coords(p));
    CHECK(q.epidemic.j0 == doctest::Approx(p.epidemic.j0).epsilon(1e-12));
    CHECK(q.epidemic.k == doctest::Approx(p.epidemic.k).epsilon(1e-12));
    CHECK(q.epidemic.n_pop == doctest::Approx(p.epidemic.n_pop).epsilon(1e-12));
    CHECK(q.obs.alpha == doctest::Approx(p.obs.alpha).epsilon(1e-12));
    CHECK(q.obs.beta == doctest::Approx(p.obs.beta).epsilon(1e-12));
  }
}

TEST_CASE("log_jacobian matches finite differences of the inverse transform") {
  Coords u{-5.0, 1.3, 10.0, 0.7, -0.4};
  double h = 1e-6;
  auto comp = [](const FullParams& p, std::size_t c) {
    switch (c) {
      case 0: return p.epidemic.j0;
      case 1: return p.epidemic.k;
      case 2: return p.epidemic.n_pop;
      case 3: return p.obs.alpha;
      default: return p.obs.beta;
    }
  };
  double oracle = 0.0;
  for (std::size_t c = 0; c < kParamDim; ++c) {
    Coords up = u, dn = u;
    up[c] += h;
    dn[c] -= h;
    oracle += std::log((comp(from_coords(up), c) - comp(from_coords(dn), c)) / (2 * h));
  }
  CHECK(log_jacobian(u) == doctest::Approx(oracle).epsilon(1e-7));
  // Far into the logit tails the result stays finite.
  CHECK(std::isfinite(log_jacobian({0, 800.0, 0, 0, 0})));
  CHECK(std::isfinite(log_jacobian({0, -800.0, 0, 0, 0})));
}

TEST_CASE("box_log_likelihood is -inf outside the box and the likelihood inside") {
  WeeklySeries s{0, {40, 45, 50, 60, 72, 70, 81, 90, 88, 95}};
  PriorBox box;
  CHECK(box_log_likelihood(kTruth, s, Variant::snapshot, box) ==
        doctest::Approx(log_likelihood(kTruth.epidemic, kTruth.obs, s)).epsilon(1e-14));
  FullParams out = kTruth;
  out.obs.alpha = 1500.0;
  CHECK(box_log_likelihood(out, s, Variant::snapshot, box) == kLogZero);
  out = kTruth;
  out.epidemic.j0 = 1.0;
  CHECK(box_log_likelihood(out, s, Variant::snapshot, box) == kLogZero);
  CHECK(box.contains(kTruth));
  CHECK_FALSE(box.contains(FullParams{{1e-7, 0.5, 10, 1}, {1, 1}}));
}

TEST_CASE("mle_fit recovers k and j0 from a synthetic series") {
  for (std::uint64_t seed : {1001u, 1002u, 1003u}) {
    WeeklySeries s = simulate_series(kTruth, 65, seed);
    MleResult r = mle_fit(s, default_init(s));
    CAPTURE(seed);
    CHECK(std::abs(r.params.epidemic.k - kTruth.epidemic.k) <= 0.05);
    CHECK(r.params.epidemic.j0 / kTruth.epidemic.j0 <= 2.0);
    CHECK(r.params.epidemic.j0 / kTruth.epidemic.j0 >= 0.5);
    CHECK(r.log_likelihood >= r.init_log_likelihood);
    CHECK(r.log_likelihood >= box_log_likelihood(kTruth, s, Variant::snapshot, PriorBox{}) - 1e-6);
  }
}

TEST_CASE("mle_fit matches a noise-free expected curve") {
  // Binomial thinning with a fixed reporting probability, large N.
  FullParams truth{{0.002, 0.85, 2e6, 1.0}, {3.0, 5.0}};
  EpidemicCurve curve = integrate_sir(truth.epidemic, 64.0);
  std::mt19937_64 rng(9);
  WeeklySeries s;
  for (int t = 0; t < 65; ++t) {
    auto n = static_cast<std::int64_t>(std::llround(truth.epidemic.n_pop * j_at(curve, t)));
    std::binomial_distribution<std::int64_t> bin(n, truth.obs.mean());
    s.counts.push_back(bin(rng));
  }
  MleResult r = mle_fit(s, default_init(s));
  EpidemicCurve fitted = integrate_sir(r.params.epidemic, 64.0);
  double sup_err = 0.0, sup_ref = 0.0;
  for (int t = 0; t < 65; ++t) {
    double ref = expected_reported(truth.epidemic, truth.obs, t, curve);
    double fit = expected_reported(r.params.epidemic, r.params.obs, t, fitted);
    sup_err = std::max(sup_err, std::abs(fit - ref));
    sup_ref = std::max(sup_ref, ref);
  }
  CHECK(sup_err <= 0.10 * sup_ref);
}

TEST_CASE("mle_fit leaves a local maximum of a one-week series in place") {
  // One week: the likelihood depends on n = N j(0) and (alpha, beta) only.
  // The box pins alpha at its upper and beta at its lower bound, and N is
  // placed at the likelihood's maximum in n found here by golden section.
  WeeklySeries s{0, {3}};
  MleOptions opt;
  opt.min_weeks = 1;
  opt.box.alpha_hi = 3.0;
  opt.box.beta_lo = 3.0;
  const ObservationParams obs{3.0, 3.0};
  auto ll_n = [&](double n) { return log_betabinom_pmf(3, n, obs); };
  double a = 3.0, b = 60.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    double c = b - g * (b - a), d = a + g * (b - a);
    if (ll_n(c) > ll_n(d)) b = d;
    else a = c;
  }
  const double n_star = 0.5 * (a + b);
  // Premise: moving alpha down or beta up lowers the likelihood at n_star.
  REQUIRE(log_betabinom_pmf(3, n_star, {2.9, 3.0}) < ll_n(n_star));
  REQUIRE(log_betabinom_pmf(3, n_star, {3.0, 3.1}) < ll_n(n_star));

  const double j0 = 0.1;
  FullParams init{{j0, 0.5, n_star / ((1.0 - j0) * j0), 1.0}, obs};
  MleResult r = mle_fit(s, init, opt);
  CHECK(r.params == init);
  CHECK(r.log_likelihood == r.init_log_likelihood);
}

TEST_CASE("mle_fit errors") {
  WeeklySeries zeros{0, std::vector<std::int64_t>(12, 0)};
  CHECK_THROWS_AS(mle_fit(zeros, kTruth), DegenerateFitError);
  WeeklySeries short_series{0, {1, 2, 3}};
  CHECK_THROWS_AS(mle_fit(short_series, kTruth), PreconditionError);
  WeeklySeries s = simulate_series(kTruth, 20, 5);
  FullParams outside = kTruth;
  outside.epidemic.k = 1.5;
  CHECK_THROWS_AS(mle_fit(s, outside), PreconditionError);
  FullParams tiny = kTruth;
  tiny.epidemic.n_pop = 1.0;
  CHECK_THROWS_AS(mle_fit(s, tiny), InvalidStartError);
  MleOptions starved;
  starved.max_evaluations = 10;
  try {
    mle_fit(s, default_init(s), starved);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.best().size() == kParamDim);
    CHECK(std::isfinite(e.best_loglik()));
  }
}

TEST_CASE("mh_sample with zero proposal scale returns the initial point") {
  WeeklySeries s = simulate_series(kTruth, 30, 3);
  McmcConfig cfg;
  cfg.iterations = 1;
  cfg.burn_in = 0;
  cfg.adapt = false;
  cfg.proposal_scale = {0, 0, 0, 0, 0};
  PosteriorChain c = mh_sample(s, kTruth, cfg);
  REQUIRE(c.size() == 1);
  CHECK(c.draws[0] == kTruth);
  CHECK(c.acceptance_rate == 1.0);
}

TEST_CASE("mh_sample is deterministic, stays in the box and tags each draw with t_end") {
  WeeklySeries s = simulate_series(kTruth, 65, 11);
  McmcConfig cfg;
  cfg.iterations = 300;
  cfg.burn_in = 200;
  cfg.seed = 99;
  PosteriorChain a = mh_sample(s, kTruth, cfg);
  PosteriorChain b = mh_sample(s, kTruth, cfg);
  REQUIRE(a.size() == 300);
  CHECK(a.draws == b.draws);
  CHECK(a.t_end_draws == b.t_end_draws);
  CHECK(a.log_likelihood == b.log_likelihood);
  CHECK(a.acceptance_rate >= 0.0);
  CHECK(a.acceptance_rate <= 1.0);
  for (std::size_t d = 0; d < a.size(); ++d) {
    REQUIRE(cfg.box.contains(a.draws[d]));
    TEndResult r = t_end_scan(a.draws[d].epidemic, a.draws[d].obs, cfg.baseline, cfg.horizon);
    REQUIRE(a.t_end_draws[d] == r.t_end);
    REQUIRE(a.censored[d] == (r.censored ? 1 : 0));
  }
  cfg.seed = 100;
  PosteriorChain c = mh_sample(s, kTruth, cfg);
  CHECK_FALSE(c.draws == a.draws);
}

TEST_CASE("mh_sample rejects a start with zero density") {
  WeeklySeries s = simulate_series(kTruth, 30, 3);
  FullParams bad = kTruth;
  bad.epidemic.n_pop = 1.0;
  CHECK_THROWS_AS(mh_sample(s, bad, McmcConfig{}), InvalidStartError);
  McmcConfig none;
  none.iterations = 0;
  CHECK_THROWS_AS(mh_sample(s, kTruth, none), PreconditionError);
}

TEST_CASE("mh_sample posterior mean of the reporting probability matches quadrature") {
  ConjugateSetup setup;
  PosteriorChain c = mh_sample(setup.series, setup.init, setup.cfg);
  std::vector<double> p;
  for (const auto& d : c.draws) p.push_back(d.obs.mean());
  double mean = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());

  double z = integrate_box(conjugate_density, 0.0, 10.0);
  double m = integrate_box([](double a, double b) { return a / (a + b) * conjugate_density(a, b); },
                           0.0, 10.0) / z;
  double se = batch_means_se(p);
  CAPTURE(mean);
  CAPTURE(m);
  CAPTURE(se);
  CHECK(std::abs(mean - m) <= 3.0 * se);
  CHECK(c.acceptance_rate > 0.1);
}

TEST_CASE("mh_sample marginal histogram of alpha matches quadrature") {
  ConjugateSetup setup;
  setup.cfg.seed = 77;
  PosteriorChain c = mh_sample(setup.series, setup.init, setup.cfg);
  double z = integrate_box(conjugate_density, 0.0, 10.0);
  const double edges[] = {0.0, 1.0, 2.0, 3.5, 5.0, 7.0, 10.0};
  for (std::size_t b = 0; b + 1 < std::size(edges); ++b) {
    double expected = integrate_box(conjugate_density, edges[b], edges[b + 1]) / z;
    std::vector<double> ind;
    for (const auto& d : c.draws)
      ind.push_back(d.obs.alpha >= edges[b] && d.obs.alpha < edges[b + 1] ? 1.0 : 0.0);
    double freq = std::accumulate(ind.begin(), ind.end(), 0.0) / static_cast<double>(ind.size());
    double se = batch_means_se(ind);
    CAPTURE(b);
    CAPTURE(freq);
    CAPTURE(expected);
    CHECK(std::abs(freq - expected) <= 3.0 * se);
  }
}

TEST_CASE("credible_interval and point_t_end on a chain") {
  PosteriorChain c;
  c.t_end_draws = {100, 100, 100, 100};
  CHECK(credible_interval(c).lo == 100);
  CHECK(credible_interval(c).hi == 100);
  CHECK(point_t_end(c) == 100);
  CHECK_THROWS_AS(credible_interval(PosteriorChain{}), EmptyInputError);
}

TEST_CASE("sensitivity_scan reproduces the direct pipeline and isolates failures") {
  WeeklySeries s = simulate_series(kTruth, 30, 21);
  SensitivityConfig cfg;
  cfg.mcmc.iterations = 100;
  cfg.mcmc.burn_in = 100;
  cfg.mcmc.seed = 500;
  cfg.threads = 3;
  std::vector<int> cutoffs{30, 5, 25, 31};
  auto entries = sensitivity_scan(s, cutoffs, cfg);
  REQUIRE(entries.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(entries[i].cutoff == cutoffs[i]);
  CHECK(entries[0].error.empty());
  CHECK_FALSE(entries[1].error.empty());
  CHECK_FALSE(entries[1].interval.has_value());
  CHECK(entries[2].error.empty());
  CHECK_FALSE(entries[3].error.empty());

  McmcConfig direct_cfg = cfg.mcmc;
  direct_cfg.seed = 500 + 30;
  PipelineResult direct = fit_and_sample(s, default_init(s), cfg.mle, direct_cfg);
  REQUIRE(entries[0].interval.has_value());
  CHECK(entries[0].interval->lo == direct.interval.lo);
  CHECK(entries[0].interval->hi == direct.interval.hi);
  CHECK(*entries[0].mle == direct.mle.params);

  // Thread count does not change results.
  cfg.threads = 1;
  auto serial = sensitivity_scan(s, cutoffs, cfg);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(serial[i].error == entries[i].error);
    if (serial[i].interval) CHECK(serial[i].interval->lo == entries[i].interval->lo);
  }
}
