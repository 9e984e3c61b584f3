#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "layoffcast/errors.hpp"
#include "layoffcast/inference.hpp"

namespace layoffcast {

namespace {

// Smallest sorted value v with F(v) >= p, i.e. index ceil(p*n) - 1. The
// epsilon treats p*n within rounding of an integer as that integer.
std::size_t inverse_cdf_index(double p, std::size_t n) {
  double pos = std::ceil(p * static_cast<double>(n) - 1e-9) - 1.0;
  pos = std::clamp(pos, 0.0, static_cast<double>(n - 1));
  return static_cast<std::size_t>(pos);
}

}  // namespace

CredibleInterval credible_interval(std::span<const int> values, double level) {
  if (values.empty()) throw EmptyInputError("credible_interval: no draws");
  if (!(level >= 0.0 && level <= 1.0)) {
    std::ostringstream os;
    os << "credible level must lie in [0,1], got " << level;
    throw ParameterDomainError(os.str());
  }
  std::vector<int> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double tail = 0.5 * (1.0 - level);
  CredibleInterval ci;
  ci.level = level;
  ci.lo = sorted[inverse_cdf_index(tail, sorted.size())];
  ci.hi = sorted[inverse_cdf_index(1.0 - tail, sorted.size())];
  return ci;
}

CredibleInterval credible_interval(const PosteriorChain& chain, double level) {
  return credible_interval(std::span<const int>(chain.t_end_draws), level);
}

int point_t_end(const PosteriorChain& chain) {
  return credible_interval(chain, 0.0).lo;
}

}  // namespace layoffcast
