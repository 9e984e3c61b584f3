#pragma once
// Deterministic SIR dynamics, the new-infection rate j(t) and the
// end-of-epidemic week t_end.
//
// Time is measured in weeks. With the default infection rate delta = 1/week
// the removal rate equals k, so j(t) depends only on (j0, k).

#include <cstddef>
#include <span>
#include <vector>

namespace layoffcast {

struct ObservationParams;

struct EpidemicParams {
  double j0 = 0.0;     // initial infected fraction J(0)
  double k = 0.0;      // removal / infection rate ratio
  double n_pop = 0.0;  // population size N (companies)
  double delta = 1.0;  // infection rate, per week

  double gamma() const { return k * delta; }
  bool operator==(const EpidemicParams&) const = default;
  // Throws ParameterDomainError unless 0 < j0 < 1, k >= 0, n_pop > 0, delta > 0.
  void validate() const;
};

inline constexpr double kDefaultDt = 0.01;
inline constexpr double kDefaultHorizon = 200.0;

// Dense RK4 solution on the grid t_m = m * dt, m = 0..steps.
class EpidemicCurve {
 public:
  EpidemicCurve(EpidemicParams params, double dt, std::size_t steps,
                std::vector<double> s, std::vector<double> i,
                std::vector<double> r);

  const EpidemicParams& params() const { return params_; }
  double dt() const { return dt_; }
  double horizon() const { return dt_ * static_cast<double>(steps_); }
  std::size_t steps() const { return steps_; }

  std::span<const double> s() const { return s_; }
  std::span<const double> i() const { return i_; }
  std::span<const double> r() const { return r_; }
  // j = delta * i * s / n_pop^2
  std::span<const double> j() const { return j_; }
  // J = 1 - s / n_pop
  std::span<const double> cum_j() const { return cum_j_; }

  double time_at(std::size_t m) const { return dt_ * static_cast<double>(m); }

 private:
  EpidemicParams params_;
  double dt_;
  std::size_t steps_;
  std::vector<double> s_, i_, r_, j_, cum_j_;
};

// Classical RK4 with I(0) = N*j0, R(0) = 0. Requires horizon > 0 and
// 0 < dt <= 0.1; the grid has round(horizon/dt) steps.
EpidemicCurve integrate_sir(const EpidemicParams& params,
                            double horizon = kDefaultHorizon,
                            double dt = kDefaultDt);

// Linear interpolation of j on the grid; exact at grid points.
double j_at(const EpidemicCurve& curve, double t);

// Integral of j over [t-1, t] by composite Simpson on the stored grid.
double windowed_rate(const EpidemicCurve& curve, double t);

// n_pop * j(t) * alpha / (alpha + beta)
double expected_count(double n_pop, double rate, const ObservationParams& obs);

double expected_reported(const EpidemicParams& params,
                         const ObservationParams& obs, double t,
                         const EpidemicCurve& curve);

inline constexpr double kPaperBaseline = 0.846;

struct TEndResult {
  int t_end = 0;
  int t_peak = 0;
  bool censored = false;  // never crossed below baseline before horizon
};

// Scans integer weeks on the falling branch: the smallest t >= t_peak with
// expected count below `baseline`. Integration stops as soon as that week is
// known. When `censored` is set, t_end equals floor(horizon).
TEndResult t_end_scan(const EpidemicParams& params, const ObservationParams& obs,
                      double baseline, double horizon, double dt = kDefaultDt);

// Same as t_end_scan but throws HorizonExceededError when censored.
int t_end(const EpidemicParams& params, const ObservationParams& obs,
          double baseline, double horizon = 300.0, double dt = kDefaultDt);

// Batched t_end over many parameter sets. Lanes run through the SIMD kernel
// in lockstep; results are identical to calling t_end_scan per entry.
std::vector<TEndResult> t_end_scan_batch(
    std::span<const EpidemicParams> params,
    std::span<const ObservationParams> obs, double baseline, double horizon,
    double dt = kDefaultDt);

}  // namespace layoffcast
