#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "layoffcast/errors.hpp"
#include "layoffcast/inference.hpp"

using namespace layoffcast;

namespace {

// Smallest attained value v with empirical CDF F(v) >= p, by counting.
int quantile_by_counting(const std::vector<int>& v, double p) {
  std::vector<int> atoms(v);
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  const double n = static_cast<double>(v.size());
  for (int a : atoms) {
    double below = static_cast<double>(std::count_if(v.begin(), v.end(), [&](int x) { return x <= a; }));
    if (below / n >= p - 1e-12) return a;
  }
  return atoms.back();
}

}  // namespace

TEST_CASE("a point mass gives a degenerate interval") {
  std::vector<int> v(50, 100);
  auto ci = credible_interval(v);
  CHECK(ci.lo == 100);
  CHECK(ci.hi == 100);
  CHECK(ci.level == 0.95);
}

TEST_CASE("twelve equal atoms keep their endpoints at 95%") {
  std::vector<int> v;
  for (int t = 96; t <= 107; ++t) v.push_back(t);
  auto ci = credible_interval(v, 0.95);
  CHECK(ci.lo == 96);
  CHECK(ci.hi == 107);
}

TEST_CASE("level zero collapses to the median atom") {
  std::vector<int> odd{5, 1, 9, 3, 7};
  auto ci = credible_interval(odd, 0.0);
  CHECK(ci.lo == 5);
  CHECK(ci.hi == 5);
  std::vector<int> even{4, 1, 3, 2};
  auto ce = credible_interval(even, 0.0);
  CHECK(ce.lo == 2);
  CHECK(ce.hi == 2);
}

TEST_CASE("intervals agree with direct quantile counting") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> len(1, 400), val(60, 140);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> v(static_cast<std::size_t>(len(rng)));
    for (int& x : v) x = val(rng);
    for (double level : {0.5, 0.8, 0.9, 0.95, 0.99}) {
      auto ci = credible_interval(v, level);
      double tail = 0.5 * (1.0 - level);
      CHECK(ci.lo == quantile_by_counting(v, tail));
      CHECK(ci.hi == quantile_by_counting(v, 1.0 - tail));
    }
  }
}

TEST_CASE("interval endpoints are attained, ordered and nested in the level") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd(100.0, 6.0);
  std::vector<int> v(1000);
  for (int& x : v) x = static_cast<int>(std::lround(nd(rng)));
  CredibleInterval prev{};
  bool first = true;
  for (double level : {0.0, 0.25, 0.5, 0.8, 0.9, 0.95, 0.99, 1.0}) {
    auto ci = credible_interval(v, level);
    CHECK(ci.lo <= ci.hi);
    CHECK(std::find(v.begin(), v.end(), ci.lo) != v.end());
    CHECK(std::find(v.begin(), v.end(), ci.hi) != v.end());
    if (!first) {
      CHECK(ci.lo <= prev.lo);
      CHECK(ci.hi >= prev.hi);
    }
    prev = ci;
    first = false;
  }
  auto full = credible_interval(v, 1.0);
  CHECK(full.lo == *std::min_element(v.begin(), v.end()));
  CHECK(full.hi == *std::max_element(v.begin(), v.end()));
}

TEST_CASE("credible_interval input checks") {
  std::vector<int> empty;
  CHECK_THROWS_AS(credible_interval(empty), EmptyInputError);
  std::vector<int> v{1, 2, 3};
  CHECK_THROWS_AS(credible_interval(v, 1.5), ParameterDomainError);
  CHECK_THROWS_AS(credible_interval(v, -0.1), ParameterDomainError);
}

TEST_CASE("overlap and containment") {
  CredibleInterval a{96, 107}, b{107, 120}, c{108, 110};
  CHECK(a.overlaps(b));
  CHECK(b.overlaps(a));
  CHECK_FALSE(a.overlaps(c));
  CHECK(a.contains(96));
  CHECK(a.contains(107));
  CHECK_FALSE(a.contains(108));
}
