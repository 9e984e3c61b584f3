#include "layoffcast/kernels/sir_batch.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define LAYOFFCAST_HAVE_AVX2_KERNEL 1
#else
#define LAYOFFCAST_HAVE_AVX2_KERNEL 0
#endif

namespace layoffcast::kernels {

#if LAYOFFCAST_HAVE_AVX2_KERNEL

namespace {

struct Deriv {
  __m256d ds;
  __m256d di;
  __m256d rem;
};

// Mirrors one stage of sir_rk4_step(); no FMA so rounding matches scalar.
__attribute__((target("avx2"))) inline Deriv stage(__m256d s, __m256d i,
                                                   __m256d infect,
                                                   __m256d remove,
                                                   __m256d n_pop,
                                                   __m256d sign) {
  __m256d inf = _mm256_div_pd(_mm256_mul_pd(_mm256_mul_pd(infect, s), i), n_pop);
  __m256d rem = _mm256_mul_pd(remove, i);
  Deriv d;
  d.ds = _mm256_xor_pd(inf, sign);
  d.di = _mm256_sub_pd(inf, rem);
  d.rem = rem;
  return d;
}

__attribute__((target("avx2"))) inline __m256d combine(__m256d a, __m256d b,
                                                       __m256d c, __m256d d,
                                                       __m256d two) {
  __m256d acc = _mm256_add_pd(a, _mm256_mul_pd(two, b));
  acc = _mm256_add_pd(acc, _mm256_mul_pd(two, c));
  return _mm256_add_pd(acc, d);
}

}  // namespace

__attribute__((target("avx2"))) void sir_advance_avx2(const SirLanes& lanes,
                                                      double dt, int steps) {
  const std::size_t n = lanes.size();
  const __m256d half = _mm256_set1_pd(0.5 * dt);
  const __m256d sixth = _mm256_set1_pd(dt / 6.0);
  const __m256d vdt = _mm256_set1_pd(dt);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d sign = _mm256_set1_pd(-0.0);

  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d s = _mm256_loadu_pd(lanes.s.data() + k);
    __m256d i = _mm256_loadu_pd(lanes.i.data() + k);
    __m256d r = _mm256_loadu_pd(lanes.r.data() + k);
    const __m256d infect = _mm256_loadu_pd(lanes.infect.data() + k);
    const __m256d remove = _mm256_loadu_pd(lanes.remove.data() + k);
    const __m256d n_pop = _mm256_loadu_pd(lanes.n_pop.data() + k);

    for (int step = 0; step < steps; ++step) {
      Deriv d1 = stage(s, i, infect, remove, n_pop, sign);
      Deriv d2 = stage(_mm256_add_pd(s, _mm256_mul_pd(half, d1.ds)),
                       _mm256_add_pd(i, _mm256_mul_pd(half, d1.di)), infect,
                       remove, n_pop, sign);
      Deriv d3 = stage(_mm256_add_pd(s, _mm256_mul_pd(half, d2.ds)),
                       _mm256_add_pd(i, _mm256_mul_pd(half, d2.di)), infect,
                       remove, n_pop, sign);
      Deriv d4 = stage(_mm256_add_pd(s, _mm256_mul_pd(vdt, d3.ds)),
                       _mm256_add_pd(i, _mm256_mul_pd(vdt, d3.di)), infect,
                       remove, n_pop, sign);
      s = _mm256_add_pd(s, _mm256_mul_pd(sixth, combine(d1.ds, d2.ds, d3.ds, d4.ds, two)));
      i = _mm256_add_pd(i, _mm256_mul_pd(sixth, combine(d1.di, d2.di, d3.di, d4.di, two)));
      r = _mm256_add_pd(r, _mm256_mul_pd(sixth, combine(d1.rem, d2.rem, d3.rem, d4.rem, two)));
    }

    _mm256_storeu_pd(lanes.s.data() + k, s);
    _mm256_storeu_pd(lanes.i.data() + k, i);
    _mm256_storeu_pd(lanes.r.data() + k, r);
  }

  if (k < n) {
    SirLanes tail{lanes.s.subspan(k),      lanes.i.subspan(k),
                  lanes.r.subspan(k),      lanes.infect.subspan(k),
                  lanes.remove.subspan(k), lanes.n_pop.subspan(k)};
    sir_advance_scalar(tail, dt, steps);
  }
}

#else

void sir_advance_avx2(const SirLanes& lanes, double dt, int steps) {
  sir_advance_scalar(lanes, dt, steps);
}

#endif

}  // namespace layoffcast::kernels
