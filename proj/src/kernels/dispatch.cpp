#include <atomic>

#include "layoffcast/kernels/sir_batch.hpp"

namespace layoffcast::kernels {

namespace {

// -1: no override.
std::atomic<int> g_forced{-1};

Isa best_available() {
#if defined(__aarch64__)
  return Isa::neon;
#elif defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
  return Isa::scalar;
#else
  return Isa::scalar;
#endif
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) {
    Isa isa = static_cast<Isa>(forced);
    return isa_available(isa) ? isa : Isa::scalar;
  }
  static const Isa best = best_available();
  return best;
}

void force_isa(Isa isa) {
  g_forced.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void clear_forced_isa() { g_forced.store(-1, std::memory_order_relaxed); }

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

void sir_advance(const SirLanes& lanes, double dt, int steps) {
  switch (active_isa()) {
    case Isa::avx2:
      sir_advance_avx2(lanes, dt, steps);
      return;
    case Isa::neon:
      sir_advance_neon(lanes, dt, steps);
      return;
    case Isa::scalar:
      break;
  }
  sir_advance_scalar(lanes, dt, steps);
}

}  // namespace layoffcast::kernels
