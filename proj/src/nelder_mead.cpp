#include "layoffcast/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "layoffcast/errors.hpp"

namespace layoffcast {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0,
                             const NelderMeadOptions& options) {
  const std::size_t dim = x0.size();
  if (dim == 0) throw PreconditionError("nelder_mead: empty start point");
  if (options.initial_step.size() != dim)
    throw PreconditionError("nelder_mead: initial_step has wrong dimension");

  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> pts(dim + 1, std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t d = 0; d < dim; ++d) pts[d + 1][d] += options.initial_step[d];
  std::vector<double> fv(dim + 1);
  for (std::size_t v = 0; v <= dim; ++v) fv[v] = eval(pts[v]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  auto along = [&](double coef, const std::vector<double>& worst, std::vector<double>& out) {
    for (std::size_t d = 0; d < dim; ++d)
      out[d] = centroid[d] + coef * (worst[d] - centroid[d]);
  };

  bool converged = false;
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    // Stable sort keeps ties deterministic.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[dim - 1];

    if (std::isfinite(fv[worst]) && fv[worst] - fv[best] < options.f_tolerance) {
      converged = true;
      break;
    }
    double diameter = 0.0;
    for (std::size_t v = 0; v <= dim; ++v)
      for (std::size_t d = 0; d < dim; ++d)
        diameter = std::max(diameter, std::abs(pts[v][d] - pts[best][d]));
    if (std::isfinite(fv[best]) && diameter < options.x_tolerance) {
      converged = true;
      break;
    }
    if (evals >= options.max_evaluations) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v <= dim; ++v) {
      if (v == worst) continue;
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += pts[v][d];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    along(-kReflect, pts[worst], trial);
    double f_r = eval(trial);

    if (f_r < fv[best]) {
      along(-kExpand, pts[worst], trial2);
      double f_e = eval(trial2);
      if (f_e < f_r) {
        pts[worst] = trial2;
        fv[worst] = f_e;
      } else {
        pts[worst] = trial;
        fv[worst] = f_r;
      }
      continue;
    }
    if (f_r < fv[second]) {
      pts[worst] = trial;
      fv[worst] = f_r;
      continue;
    }

    // Contraction: outside if the reflected point beat the worst, else inside.
    bool outside = f_r < fv[worst];
    along(outside ? -kContract : kContract, pts[worst], trial2);
    double f_c = eval(trial2);
    if (outside ? f_c <= f_r : f_c < fv[worst]) {
      pts[worst] = trial2;
      fv[worst] = f_c;
      continue;
    }

    for (std::size_t v = 0; v <= dim; ++v) {
      if (v == best) continue;
      for (std::size_t d = 0; d < dim; ++d)
        pts[v][d] = pts[best][d] + kShrink * (pts[v][d] - pts[best][d]);
      fv[v] = eval(pts[v]);
    }
  }

  auto best_it = std::min_element(fv.begin(), fv.end());
  NelderMeadResult out;
  out.x = pts[static_cast<std::size_t>(best_it - fv.begin())];
  out.f = *best_it;
  out.evaluations = evals;
  out.converged = converged;
  return out;
}

}  // namespace layoffcast
