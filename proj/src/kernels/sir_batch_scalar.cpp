#include "layoffcast/kernels/sir_batch.hpp"

namespace layoffcast::kernels {

void sir_advance_scalar(const SirLanes& lanes, double dt, int steps) {
  const std::size_t n = lanes.size();
  for (std::size_t k = 0; k < n; ++k) {
    SirState y{lanes.s[k], lanes.i[k], lanes.r[k]};
    const SirRates p{lanes.infect[k], lanes.remove[k], lanes.n_pop[k]};
    for (int step = 0; step < steps; ++step) y = sir_rk4_step(y, p, dt);
    lanes.s[k] = y.s;
    lanes.i[k] = y.i;
    lanes.r[k] = y.r;
  }
}

}  // namespace layoffcast::kernels
