#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "layoffcast/kernels/sir_batch.hpp"

using namespace layoffcast::kernels;

namespace {

struct Batch {
  std::vector<double> s, i, r, infect, remove, n_pop;

  explicit Batch(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> j0(1e-5, 0.2), k(0.0, 1.5), logn(0.0, 23.0),
        delta(0.2, 2.0);
    for (std::size_t lane = 0; lane < n; ++lane) {
      double n_pop_v = std::exp(logn(rng));
      double j = j0(rng);
      double d = delta(rng);
      s.push_back(n_pop_v * (1.0 - j));
      i.push_back(n_pop_v * j);
      r.push_back(0.0);
      infect.push_back(d);
      remove.push_back(k(rng) * d);
      n_pop.push_back(n_pop_v);
    }
  }

  SirLanes lanes() { return SirLanes{s, i, r, infect, remove, n_pop}; }
};

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

}  // namespace

TEST_CASE("scalar batch matches the single-lane RK4 step") {
  Batch b(5, 1);
  std::vector<SirState> ref;
  for (std::size_t k = 0; k < 5; ++k) {
    SirState y{b.s[k], b.i[k], b.r[k]};
    SirRates p{b.infect[k], b.remove[k], b.n_pop[k]};
    for (int step = 0; step < 250; ++step) y = sir_rk4_step(y, p, 0.01);
    ref.push_back(y);
  }
  sir_advance_scalar(b.lanes(), 0.01, 250);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(b.s[k] == ref[k].s);
    CHECK(b.i[k] == ref[k].i);
    CHECK(b.r[k] == ref[k].r);
  }
}

TEST_CASE("SIMD variants are bit-identical to scalar for every tail length") {
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (!isa_available(isa)) {
      MESSAGE(isa_name(isa) << " not available on this CPU; skipped");
      continue;
    }
    for (std::size_t n = 0; n <= 11; ++n) {
      CAPTURE(n);
      Batch ref(n, 100 + n);
      Batch simd(n, 100 + n);
      sir_advance_scalar(ref.lanes(), 0.01, 300);
      if (isa == Isa::avx2) sir_advance_avx2(simd.lanes(), 0.01, 300);
      else sir_advance_neon(simd.lanes(), 0.01, 300);
      CHECK(bit_equal(ref.s, simd.s));
      CHECK(bit_equal(ref.i, simd.i));
      CHECK(bit_equal(ref.r, simd.r));
    }
  }
}

TEST_CASE("dispatch honours a forced ISA and falls back when unavailable") {
  force_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  force_isa(Isa::avx2);
  CHECK(active_isa() == (isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar));
  force_isa(Isa::neon);
  CHECK(active_isa() == (isa_available(Isa::neon) ? Isa::neon : Isa::scalar));
  clear_forced_isa();
  CHECK(isa_available(active_isa()));

  Batch a(37, 9), b(37, 9);
  force_isa(Isa::scalar);
  sir_advance(a.lanes(), 0.02, 120);
  clear_forced_isa();
  sir_advance(b.lanes(), 0.02, 120);
  CHECK(bit_equal(a.s, b.s));
  CHECK(bit_equal(a.i, b.i));
  CHECK(bit_equal(a.r, b.r));
}

TEST_CASE("kernel conserves S + I + R") {
  Batch b(16, 3);
  std::vector<double> total(16);
  for (std::size_t k = 0; k < 16; ++k) total[k] = b.s[k] + b.i[k] + b.r[k];
  sir_advance(b.lanes(), 0.01, 20000);
  for (std::size_t k = 0; k < 16; ++k)
    CHECK(std::abs(b.s[k] + b.i[k] + b.r[k] - total[k]) / total[k] <= 1e-9);
}
