#pragma once

#include <functional>
#include <span>
#include <vector>

namespace layoffcast {

struct NelderMeadOptions {
  int max_evaluations = 5000;
  // Stop when max f - min f over the simplex falls below this.
  double f_tolerance = 1e-8;
  // Also stop when every vertex lies within this distance of the best one
  // (per coordinate). Needed when the optimum sits on a wall of +inf values,
  // where the spread in f never becomes finite.
  double x_tolerance = 1e-10;
  // Initial simplex: x0 plus x0 + step[i] * e_i.
  std::vector<double> initial_step;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Minimizes f from x0 with the standard reflection / expansion / contraction /
// shrink moves (coefficients 1, 2, 0.5, 0.5). f may return +inf to reject a
// point. The returned point is never worse than x0.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0,
                             const NelderMeadOptions& options);

}  // namespace layoffcast
