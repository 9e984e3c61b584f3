#include "layoffcast/betabinom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "layoffcast/errors.hpp"

namespace layoffcast {

namespace {

// lgamma(x) - Stirling(x) for x >= 10, from the asymptotic series
// sum B_2m / (2m (2m-1) x^(2m-1)). Eight terms reach double precision.
double lgamma_correction(double x) {
  static constexpr double c[] = {
      1.0 / 12.0,          -1.0 / 360.0,   1.0 / 1260.0,      -1.0 / 1680.0,
      1.0 / 1188.0,        -691.0 / 360360.0, 1.0 / 156.0,    -3617.0 / 122400.0,
  };
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double sum = 0.0;
  for (int m = 7; m >= 0; --m) sum = sum * inv2 + c[m];
  return sum * inv;
}

constexpr double kHalfLog2Pi = 0.918938533204672741780329736406;

void check_positive(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || std::isnan(a) || std::isnan(b)) {
    std::ostringstream os;
    os << "lbeta requires positive arguments, got (" << a << ", " << b << ")";
    throw ParameterDomainError(os.str());
  }
}

}  // namespace

void ObservationParams::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    std::ostringstream os;
    os << "invalid observation parameters: alpha=" << alpha << " beta=" << beta;
    throw ParameterDomainError(os.str());
  }
}

WeeklySeries WeeklySeries::truncated(std::size_t weeks) const {
  WeeklySeries out;
  out.start_week = start_week;
  out.counts.assign(counts.begin(),
                    counts.begin() + static_cast<std::ptrdiff_t>(std::min(weeks, counts.size())));
  return out;
}

std::string_view variant_name(Variant v) {
  return v == Variant::windowed ? "windowed" : "snapshot";
}

Variant parse_variant(std::string_view text) {
  if (text == "snapshot") return Variant::snapshot;
  if (text == "windowed") return Variant::windowed;
  throw FormatError("unknown variant '" + std::string(text) +
                    "' (expected snapshot|windowed)");
}

double lbeta(double a, double b) {
  check_positive(a, b);
  if (std::isinf(a) || std::isinf(b)) return kLogZero;
  const double p = std::min(a, b);
  const double q = std::max(a, b);

  if (p >= 10.0) {
    // Both large: Stirling for all three gamma terms, corrections combined.
    double corr = lgamma_correction(p) + lgamma_correction(q) -
                  lgamma_correction(p + q);
    return -0.5 * std::log(q) + kHalfLog2Pi + corr +
           (p - 0.5) * std::log(p / (p + q)) + q * std::log1p(-p / (p + q));
  }
  if (q >= 10.0) {
    // Only q large: lgamma(q) - lgamma(p+q) via Stirling.
    double corr = lgamma_correction(q) - lgamma_correction(p + q);
    return std::lgamma(p) + corr + p - p * std::log(p + q) +
           (q - 0.5) * std::log1p(-p / (p + q));
  }
  return std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q);
}

double lchoose(double n, double x) {
  // C(n, x) = 1 / ((n + 1) B(x + 1, n - x + 1))
  return -std::log1p(n) - lbeta(x + 1.0, n - x + 1.0);
}

double log_betabinom_pmf(std::int64_t x, double n, const ObservationParams& obs) {
  if (x < 0 || !(n >= 0.0)) {
    std::ostringstream os;
    os << "beta-binomial needs x >= 0 and n >= 0, got x=" << x << " n=" << n;
    throw ParameterDomainError(os.str());
  }
  obs.validate();
  const auto xd = static_cast<double>(x);
  if (xd > n) return kLogZero;
  return lchoose(n, xd) + lbeta(xd + obs.alpha, n - xd + obs.beta) -
         lbeta(obs.alpha, obs.beta);
}

double observed_rate(const EpidemicCurve& curve, int t, Variant variant) {
  if (variant == Variant::windowed && t >= 1) return windowed_rate(curve, t);
  return j_at(curve, t);
}

double log_likelihood(const EpidemicCurve& curve, const ObservationParams& obs,
                      const WeeklySeries& series, Variant variant) {
  if (series.empty()) throw EmptyInputError("log_likelihood: empty series");
  obs.validate();
  const double n_pop = curve.params().n_pop;
  double total = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    double n = n_pop * observed_rate(curve, static_cast<int>(t), variant);
    double term = log_betabinom_pmf(series.counts[t], std::max(n, 0.0), obs);
    if (term == kLogZero) return kLogZero;
    total += term;
  }
  return total;
}

double log_likelihood(const EpidemicParams& eparams, const ObservationParams& obs,
                      const WeeklySeries& series, Variant variant, double dt) {
  if (series.empty()) throw EmptyInputError("log_likelihood: empty series");
  double horizon = std::max<double>(1.0, static_cast<double>(series.size() - 1));
  EpidemicCurve curve = integrate_sir(eparams, horizon, dt);
  return log_likelihood(curve, obs, series, variant);
}

}  // namespace layoffcast
