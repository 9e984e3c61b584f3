#include "layoffcast/sir.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "layoffcast/betabinom.hpp"
#include "layoffcast/errors.hpp"
#include "layoffcast/kernels/sir_batch.hpp"

namespace layoffcast {

namespace {

constexpr double kGridEps = 1e-9;

kernels::SirRates rates_of(const EpidemicParams& p) {
  return kernels::SirRates{p.delta, p.gamma(), p.n_pop};
}

kernels::SirState initial_state(const EpidemicParams& p) {
  return kernels::SirState{p.n_pop * (1.0 - p.j0), p.n_pop * p.j0, 0.0};
}

void check_dt(double dt) {
  if (!(dt > 0.0) || dt > 0.1) {
    std::ostringstream os;
    os << "dt must lie in (0, 0.1], got " << dt;
    throw ParameterDomainError(os.str());
  }
}

// Steps per week when 1/dt is (numerically) an integer, else 0.
int steps_per_week(double dt) {
  double inv = 1.0 / dt;
  double rounded = std::round(inv);
  if (std::abs(inv - rounded) < 1e-9 * rounded) return static_cast<int>(rounded);
  return 0;
}

// Per-lane bookkeeping for the falling-branch scan.
struct ScanState {
  int peak = 0;
  double peak_value = 0.0;
  bool done = false;
  TEndResult result;
};

// Feed the expected count of week w. Returns true once t_end is known.
bool scan_week(ScanState& st, int w, double e, double baseline) {
  if (w == 0 || e > st.peak_value) {
    st.peak = w;
    st.peak_value = e;
    return false;
  }
  if (e < st.peak_value && e < baseline) {
    st.result.t_peak = st.peak;
    st.result.t_end = st.peak_value < baseline ? st.peak : w;
    st.result.censored = false;
    st.done = true;
    return true;
  }
  return false;
}

void finish_censored(ScanState& st, int last_week) {
  st.result.t_peak = st.peak;
  st.result.t_end = last_week;
  st.result.censored = true;
  st.done = true;
}

TEndResult scan_dense(const EpidemicParams& params, const ObservationParams& obs,
                      double baseline, double horizon, double dt) {
  EpidemicCurve curve = integrate_sir(params, horizon, dt);
  int last = static_cast<int>(std::floor(curve.horizon() + kGridEps));
  ScanState st;
  for (int w = 0; w <= last; ++w) {
    double e = expected_count(params.n_pop, j_at(curve, w), obs);
    if (scan_week(st, w, e, baseline)) return st.result;
  }
  finish_censored(st, last);
  return st.result;
}

void check_scan_inputs(double baseline, double horizon, double dt) {
  if (!(baseline > 0.0)) throw ParameterDomainError("baseline must be positive");
  if (!(horizon > 0.0)) throw ParameterDomainError("horizon must be positive");
  check_dt(dt);
}

}  // namespace

void EpidemicParams::validate() const {
  std::ostringstream os;
  if (!(j0 > 0.0 && j0 < 1.0)) os << "j0 must lie in (0,1), got " << j0 << "; ";
  if (!(k >= 0.0) || !std::isfinite(k)) os << "k must be >= 0, got " << k << "; ";
  if (!(n_pop > 0.0) || !std::isfinite(n_pop))
    os << "n_pop must be > 0, got " << n_pop << "; ";
  if (!(delta > 0.0) || !std::isfinite(delta))
    os << "delta must be > 0, got " << delta << "; ";
  std::string msg = os.str();
  if (!msg.empty()) throw ParameterDomainError("invalid epidemic parameters: " + msg);
}

EpidemicCurve::EpidemicCurve(EpidemicParams params, double dt, std::size_t steps,
                             std::vector<double> s, std::vector<double> i,
                             std::vector<double> r)
    : params_(params),
      dt_(dt),
      steps_(steps),
      s_(std::move(s)),
      i_(std::move(i)),
      r_(std::move(r)) {
  const kernels::SirRates rates = rates_of(params_);
  j_.resize(s_.size());
  cum_j_.resize(s_.size());
  for (std::size_t m = 0; m < s_.size(); ++m) {
    j_[m] = kernels::sir_rate_fraction({s_[m], i_[m], r_[m]}, rates);
    cum_j_[m] = 1.0 - s_[m] / params_.n_pop;
  }
  // S(0) = N(1 - j0) need not round-trip through 1 - S/N exactly.
  if (!cum_j_.empty()) cum_j_[0] = params_.j0;
}

EpidemicCurve integrate_sir(const EpidemicParams& params, double horizon,
                            double dt) {
  params.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ParameterDomainError("horizon must be positive");
  check_dt(dt);

  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  if (steps == 0) throw ParameterDomainError("horizon shorter than one step");

  std::vector<double> s(steps + 1), i(steps + 1), r(steps + 1);
  const kernels::SirRates rates = rates_of(params);
  kernels::SirState y = initial_state(params);
  s[0] = y.s;
  i[0] = y.i;
  r[0] = y.r;
  for (std::size_t m = 1; m <= steps; ++m) {
    y = kernels::sir_rk4_step(y, rates, dt);
    s[m] = y.s;
    i[m] = y.i;
    r[m] = y.r;
  }
  return EpidemicCurve(params, dt, steps, std::move(s), std::move(i), std::move(r));
}

double j_at(const EpidemicCurve& curve, double t) {
  const double horizon = curve.horizon();
  if (!(t >= -kGridEps && t <= horizon + kGridEps)) {
    std::ostringstream os;
    os << "t=" << t << " outside [0, " << horizon << "]";
    throw RangeError(os.str());
  }
  auto j = curve.j();
  double pos = std::clamp(t / curve.dt(), 0.0, static_cast<double>(curve.steps()));
  double nearest = std::round(pos);
  if (std::abs(pos - nearest) < kGridEps) return j[static_cast<std::size_t>(nearest)];
  auto lo = static_cast<std::size_t>(std::floor(pos));
  double frac = pos - static_cast<double>(lo);
  return j[lo] + frac * (j[lo + 1] - j[lo]);
}

double windowed_rate(const EpidemicCurve& curve, double t) {
  if (!(t >= 1.0 - kGridEps) || t > curve.horizon() + kGridEps) {
    std::ostringstream os;
    os << "windowed rate needs 1 <= t <= " << curve.horizon() << ", got " << t;
    throw RangeError(os.str());
  }
  const double dt = curve.dt();
  const double a = t - 1.0;
  const double b = t;
  auto j = curve.j();

  // Grid points inside [a, b].
  auto ma = static_cast<std::size_t>(std::max(0.0, std::ceil(a / dt - kGridEps)));
  auto mb = static_cast<std::size_t>(std::min<double>(
      static_cast<double>(curve.steps()), std::floor(b / dt + kGridEps)));

  double total = 0.0;
  // Partial cells at either end (only when a or b is off-grid).
  double ta = curve.time_at(ma);
  if (ta - a > kGridEps) total += 0.5 * (ta - a) * (j_at(curve, a) + j[ma]);
  double tb = curve.time_at(mb);
  if (b - tb > kGridEps) total += 0.5 * (b - tb) * (j[mb] + j_at(curve, b));

  std::size_t intervals = mb - ma;
  std::size_t simpson_end = mb;
  if (intervals % 2 == 1) {
    if (intervals >= 3) {
      // Simpson 3/8 on the last three cells.
      std::size_t m = mb - 3;
      total += 3.0 * dt / 8.0 * (j[m] + 3.0 * j[m + 1] + 3.0 * j[m + 2] + j[m + 3]);
      simpson_end = m;
    } else {
      total += 0.5 * dt * (j[ma] + j[mb]);
      simpson_end = ma;
    }
  }
  if (simpson_end > ma) {
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t m = ma + 1; m < simpson_end; ++m) {
      if ((m - ma) % 2 == 1) {
        odd += j[m];
      } else {
        even += j[m];
      }
    }
    total += dt / 3.0 * (j[ma] + 4.0 * odd + 2.0 * even + j[simpson_end]);
  }
  return total;
}

double expected_count(double n_pop, double rate, const ObservationParams& obs) {
  double total = obs.alpha + obs.beta;
  if (!(total > 0.0)) throw ParameterDomainError("alpha + beta must be positive");
  return n_pop * rate * (obs.alpha / total);
}

double expected_reported(const EpidemicParams& params,
                         const ObservationParams& obs, double t,
                         const EpidemicCurve& curve) {
  return expected_count(params.n_pop, j_at(curve, t), obs);
}

TEndResult t_end_scan(const EpidemicParams& params, const ObservationParams& obs,
                      double baseline, double horizon, double dt) {
  auto results = t_end_scan_batch(std::span(&params, 1), std::span(&obs, 1),
                                  baseline, horizon, dt);
  return results.front();
}

int t_end(const EpidemicParams& params, const ObservationParams& obs,
          double baseline, double horizon, double dt) {
  TEndResult r = t_end_scan(params, obs, baseline, horizon, dt);
  if (r.censored) {
    std::ostringstream os;
    os << "expected count stays above baseline " << baseline
       << " through horizon " << horizon << " weeks";
    throw HorizonExceededError(os.str(), horizon);
  }
  return r.t_end;
}

std::vector<TEndResult> t_end_scan_batch(std::span<const EpidemicParams> params,
                                         std::span<const ObservationParams> obs,
                                         double baseline, double horizon,
                                         double dt) {
  if (params.size() != obs.size())
    throw PreconditionError("t_end_scan_batch: params/obs size mismatch");
  check_scan_inputs(baseline, horizon, dt);
  for (const auto& p : params) p.validate();
  for (const auto& o : obs) o.validate();

  const std::size_t n = params.size();
  std::vector<TEndResult> out(n);
  const int spw = steps_per_week(dt);
  if (spw == 0) {
    // Integer weeks are not grid points; fall back to interpolated curves.
    for (std::size_t k = 0; k < n; ++k)
      out[k] = scan_dense(params[k], obs[k], baseline, horizon, dt);
    return out;
  }

  // Weeks available on the dense grid of the same horizon.
  const auto total_steps = std::llround(horizon / dt);
  const int last_week = static_cast<int>(total_steps / spw);

  std::vector<ScanState> scan(n);
  // Active lanes, compacted as lanes finish.
  std::vector<std::size_t> lane_of;
  std::vector<double> s, i, r, infect, remove, n_pop;
  lane_of.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    kernels::SirState y = initial_state(params[k]);
    double e0 = expected_count(params[k].n_pop,
                               kernels::sir_rate_fraction(y, rates_of(params[k])),
                               obs[k]);
    scan_week(scan[k], 0, e0, baseline);
    lane_of.push_back(k);
    s.push_back(y.s);
    i.push_back(y.i);
    r.push_back(y.r);
    infect.push_back(params[k].delta);
    remove.push_back(params[k].gamma());
    n_pop.push_back(params[k].n_pop);
  }

  for (int w = 1; w <= last_week && !lane_of.empty(); ++w) {
    kernels::SirLanes lanes{s, i, r, infect, remove, n_pop};
    kernels::sir_advance(lanes, dt, spw);

    std::size_t keep = 0;
    for (std::size_t a = 0; a < lane_of.size(); ++a) {
      std::size_t k = lane_of[a];
      const kernels::SirRates rates{infect[a], remove[a], n_pop[a]};
      double rate = kernels::sir_rate_fraction({s[a], i[a], r[a]}, rates);
      double e = expected_count(params[k].n_pop, rate, obs[k]);
      if (scan_week(scan[k], w, e, baseline)) continue;
      lane_of[keep] = k;
      s[keep] = s[a];
      i[keep] = i[a];
      r[keep] = r[a];
      infect[keep] = infect[a];
      remove[keep] = remove[a];
      n_pop[keep] = n_pop[a];
      ++keep;
    }
    lane_of.resize(keep);
    s.resize(keep);
    i.resize(keep);
    r.resize(keep);
    infect.resize(keep);
    remove.resize(keep);
    n_pop.resize(keep);
  }

  for (std::size_t k : lane_of) finish_censored(scan[k], last_week);
  for (std::size_t k = 0; k < n; ++k) out[k] = scan[k].result;
  return out;
}

}  // namespace layoffcast
