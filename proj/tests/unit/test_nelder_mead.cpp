#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "layoffcast/nelder_mead.hpp"

using namespace layoffcast;

TEST_CASE("nelder_mead finds the minimum of a shifted quadratic") {
  auto f = [](std::span<const double> x) {
    return (x[0] - 1.5) * (x[0] - 1.5) + 4.0 * (x[1] + 0.25) * (x[1] + 0.25) + 3.0;
  };
  std::vector<double> x0{0.0, 0.0};
  NelderMeadOptions opt;
  opt.f_tolerance = 1e-14;
  opt.initial_step = {0.5, 0.5};
  auto r = nelder_mead(f, x0, opt);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(-0.25).epsilon(1e-5));
  CHECK(r.f == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("nelder_mead handles the Rosenbrock valley") {
  auto f = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  std::vector<double> x0{-1.2, 1.0};
  NelderMeadOptions opt;
  opt.f_tolerance = 1e-16;
  opt.max_evaluations = 20000;
  opt.initial_step = {0.5, 0.5};
  auto r = nelder_mead(f, x0, opt);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("nelder_mead treats +inf and NaN as rejected points") {
  // Feasible half-plane x >= 1; unconstrained minimum at x = 0.
  auto f = [](std::span<const double> x) {
    if (x[0] < 1.0) return std::numeric_limits<double>::infinity();
    if (x[0] > 5.0) return std::numeric_limits<double>::quiet_NaN();
    return x[0] * x[0];
  };
  std::vector<double> x0{3.0};
  NelderMeadOptions opt;
  opt.initial_step = {0.5};
  auto r = nelder_mead(f, x0, opt);
  CHECK(r.x[0] >= 1.0);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("nelder_mead never returns a point worse than the start") {
  auto f = [](std::span<const double> x) { return std::abs(x[0]) + std::abs(x[1]); };
  std::vector<double> x0{0.0, 0.0};
  NelderMeadOptions opt;
  opt.initial_step = {0.5, 0.5};
  auto r = nelder_mead(f, x0, opt);
  CHECK(r.f <= 0.0);
  CHECK(r.x == x0);
}

TEST_CASE("nelder_mead reports exhaustion of its budget") {
  auto f = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  std::vector<double> x0{-1.2, 1.0};
  NelderMeadOptions opt;
  opt.max_evaluations = 20;
  opt.initial_step = {0.5, 0.5};
  auto r = nelder_mead(f, x0, opt);
  CHECK_FALSE(r.converged);
  CHECK(r.evaluations <= 20 + 4);
}

TEST_CASE("nelder_mead converges onto a wall of rejected points") {
  // Minimum on the boundary x >= 2, y >= -1 of the feasible region.
  auto f = [](std::span<const double> x) {
    if (x[0] < 2.0 || x[1] < -1.0) return std::numeric_limits<double>::infinity();
    return x[0] + x[1];
  };
  std::vector<double> x0{2.0, -1.0};
  NelderMeadOptions opt;
  opt.initial_step = {-0.5, -0.5};
  auto r = nelder_mead(f, x0, opt);
  CHECK(r.converged);
  CHECK(r.x == x0);
}
