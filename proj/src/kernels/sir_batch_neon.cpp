#include "layoffcast/kernels/sir_batch.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace layoffcast::kernels {

#if defined(__aarch64__)

namespace {

struct Deriv {
  float64x2_t ds;
  float64x2_t di;
  float64x2_t rem;
};

inline Deriv stage(float64x2_t s, float64x2_t i, float64x2_t infect,
                   float64x2_t remove, float64x2_t n_pop) {
  float64x2_t inf = vdivq_f64(vmulq_f64(vmulq_f64(infect, s), i), n_pop);
  float64x2_t rem = vmulq_f64(remove, i);
  return Deriv{vnegq_f64(inf), vsubq_f64(inf, rem), rem};
}

// vmulq/vaddq only: vmlaq_f64 may fuse and break parity with scalar.
inline float64x2_t combine(float64x2_t a, float64x2_t b, float64x2_t c,
                           float64x2_t d, float64x2_t two) {
  float64x2_t acc = vaddq_f64(a, vmulq_f64(two, b));
  acc = vaddq_f64(acc, vmulq_f64(two, c));
  return vaddq_f64(acc, d);
}

}  // namespace

void sir_advance_neon(const SirLanes& lanes, double dt, int steps) {
  const std::size_t n = lanes.size();
  const float64x2_t half = vdupq_n_f64(0.5 * dt);
  const float64x2_t sixth = vdupq_n_f64(dt / 6.0);
  const float64x2_t vdt = vdupq_n_f64(dt);
  const float64x2_t two = vdupq_n_f64(2.0);

  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    float64x2_t s = vld1q_f64(lanes.s.data() + k);
    float64x2_t i = vld1q_f64(lanes.i.data() + k);
    float64x2_t r = vld1q_f64(lanes.r.data() + k);
    const float64x2_t infect = vld1q_f64(lanes.infect.data() + k);
    const float64x2_t remove = vld1q_f64(lanes.remove.data() + k);
    const float64x2_t n_pop = vld1q_f64(lanes.n_pop.data() + k);

    for (int step = 0; step < steps; ++step) {
      Deriv d1 = stage(s, i, infect, remove, n_pop);
      Deriv d2 = stage(vaddq_f64(s, vmulq_f64(half, d1.ds)),
                       vaddq_f64(i, vmulq_f64(half, d1.di)), infect, remove, n_pop);
      Deriv d3 = stage(vaddq_f64(s, vmulq_f64(half, d2.ds)),
                       vaddq_f64(i, vmulq_f64(half, d2.di)), infect, remove, n_pop);
      Deriv d4 = stage(vaddq_f64(s, vmulq_f64(vdt, d3.ds)),
                       vaddq_f64(i, vmulq_f64(vdt, d3.di)), infect, remove, n_pop);
      s = vaddq_f64(s, vmulq_f64(sixth, combine(d1.ds, d2.ds, d3.ds, d4.ds, two)));
      i = vaddq_f64(i, vmulq_f64(sixth, combine(d1.di, d2.di, d3.di, d4.di, two)));
      r = vaddq_f64(r, vmulq_f64(sixth, combine(d1.rem, d2.rem, d3.rem, d4.rem, two)));
    }

    vst1q_f64(lanes.s.data() + k, s);
    vst1q_f64(lanes.i.data() + k, i);
    vst1q_f64(lanes.r.data() + k, r);
  }

  if (k < n) {
    SirLanes tail{lanes.s.subspan(k),      lanes.i.subspan(k),
                  lanes.r.subspan(k),      lanes.infect.subspan(k),
                  lanes.remove.subspan(k), lanes.n_pop.subspan(k)};
    sir_advance_scalar(tail, dt, steps);
  }
}

#else

void sir_advance_neon(const SirLanes& lanes, double dt, int steps) {
  sir_advance_scalar(lanes, dt, steps);
}

#endif

}  // namespace layoffcast::kernels
