#pragma once
// Lockstep RK4 integration of many independent SIR systems.
//
// Lanes are stored structure-of-arrays so the SIMD variants can load four
// (AVX2) or two (NEON) systems per register. Every variant performs the same
// sequence of IEEE operations per lane as sir_rk4_step() below, without fused
// multiply-add, so all variants are bit-identical to the scalar reference.

#include <cstddef>
#include <span>
#include <string_view>

namespace layoffcast::kernels {

struct SirState {
  double s;
  double i;
  double r;
};

struct SirRates {
  double infect;   // delta
  double remove;   // gamma = k * delta
  double n_pop;
};

// One classical RK4 step of
//   S' = -infect*S*I/N,  I' = infect*S*I/N - remove*I,  R' = remove*I.
inline SirState sir_rk4_step(const SirState& y, const SirRates& p, double dt) {
  const double half = 0.5 * dt;
  const double sixth = dt / 6.0;

  double inf1 = p.infect * y.s * y.i / p.n_pop;
  double rem1 = p.remove * y.i;
  double ds1 = -inf1;
  double di1 = inf1 - rem1;

  double s2 = y.s + half * ds1;
  double i2 = y.i + half * di1;
  double inf2 = p.infect * s2 * i2 / p.n_pop;
  double rem2 = p.remove * i2;
  double ds2 = -inf2;
  double di2 = inf2 - rem2;

  double s3 = y.s + half * ds2;
  double i3 = y.i + half * di2;
  double inf3 = p.infect * s3 * i3 / p.n_pop;
  double rem3 = p.remove * i3;
  double ds3 = -inf3;
  double di3 = inf3 - rem3;

  double s4 = y.s + dt * ds3;
  double i4 = y.i + dt * di3;
  double inf4 = p.infect * s4 * i4 / p.n_pop;
  double rem4 = p.remove * i4;
  double ds4 = -inf4;
  double di4 = inf4 - rem4;

  SirState out;
  out.s = y.s + sixth * (ds1 + 2.0 * ds2 + 2.0 * ds3 + ds4);
  out.i = y.i + sixth * (di1 + 2.0 * di2 + 2.0 * di3 + di4);
  out.r = y.r + sixth * (rem1 + 2.0 * rem2 + 2.0 * rem3 + rem4);
  return out;
}

// Instantaneous new-infection fraction j = infect * I * S / N^2, evaluated on
// the fractions so tiny or huge N cannot underflow N^2.
inline double sir_rate_fraction(const SirState& y, const SirRates& p) {
  return p.infect * (y.i / p.n_pop) * (y.s / p.n_pop);
}

// Mutable view over a batch of lanes. All spans must have equal length.
struct SirLanes {
  std::span<double> s;
  std::span<double> i;
  std::span<double> r;
  std::span<const double> infect;
  std::span<const double> remove;
  std::span<const double> n_pop;

  std::size_t size() const { return s.size(); }
};

enum class Isa { scalar, avx2, neon };

// Advance every lane by `steps` RK4 steps of size dt.
void sir_advance_scalar(const SirLanes& lanes, double dt, int steps);
void sir_advance_avx2(const SirLanes& lanes, double dt, int steps);
void sir_advance_neon(const SirLanes& lanes, double dt, int steps);

// Dispatching entry point; picks the widest ISA the CPU supports unless a
// narrower one was forced.
void sir_advance(const SirLanes& lanes, double dt, int steps);

bool isa_available(Isa isa);
Isa active_isa();
// Restrict dispatch to `isa` (falls back to scalar if unavailable).
void force_isa(Isa isa);
void clear_forced_isa();
std::string_view isa_name(Isa isa);

}  // namespace layoffcast::kernels
