#pragma once
// Beta-binomial reporting layer.
//
// Each of the n = N*j(t) events in week t is reported independently with a
// probability p(t) ~ Beta(alpha, beta) drawn fresh every week. The observed
// count is therefore beta-binomial. n is generally not an integer, so the
// binomial coefficient uses its gamma-function continuation.

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "layoffcast/sir.hpp"

namespace layoffcast {

struct ObservationParams {
  double alpha = 1.0;
  double beta = 1.0;

  double mean() const { return alpha / (alpha + beta); }
  bool operator==(const ObservationParams&) const = default;
  void validate() const;
};

struct WeeklySeries {
  int start_week = 0;  // WeekIndex of counts[0]
  std::vector<std::int64_t> counts;

  std::size_t size() const { return counts.size(); }
  bool empty() const { return counts.empty(); }
  // First `weeks` entries.
  WeeklySeries truncated(std::size_t weeks) const;
};

enum class Variant { snapshot, windowed };

std::string_view variant_name(Variant v);
// Throws FormatError for anything but "snapshot" / "windowed".
Variant parse_variant(std::string_view text);

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log B(a, b), accurate also when one argument is large and the other small.
double lbeta(double a, double b);

// log C(n, x) with real n >= x >= 0.
double lchoose(double n, double x);

// log P(X = x) for X ~ BetaBinomial(n, alpha, beta) with real n.
// Returns kLogZero when x > n.
double log_betabinom_pmf(std::int64_t x, double n, const ObservationParams& obs);

// Sum of log-pmf terms over the series, rate(t) taken at integer weeks
// t = 0..T. The windowed variant integrates j over [t-1, t]; week 0 has no
// preceding window and uses the snapshot rate.
double log_likelihood(const EpidemicParams& eparams, const ObservationParams& obs,
                      const WeeklySeries& series, Variant variant = Variant::snapshot,
                      double dt = kDefaultDt);

// Same, on an already integrated curve (horizon >= T).
double log_likelihood(const EpidemicCurve& curve, const ObservationParams& obs,
                      const WeeklySeries& series, Variant variant);

// Observation-layer rate of week t for the chosen variant.
double observed_rate(const EpidemicCurve& curve, int t, Variant variant);

}  // namespace layoffcast
