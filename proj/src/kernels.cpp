#include "shapeflow/kernels.hpp"

#include <atomic>
#include <cmath>

#include "shapeflow/errors.hpp"

namespace shapeflow::kern {

namespace {

std::atomic<int> g_forced{-1};  // -1 auto, otherwise static_cast<int>(Isa)

Isa detect() {
#if defined(__x86_64__) || defined(__i386__)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return Isa::avx2;
#endif
  return Isa::scalar;
}

const detail::Backend& backend_for(Isa isa) {
  return isa == Isa::avx2 ? detail::avx2_backend() : detail::scalar_backend();
}

const detail::Backend& active_backend() { return backend_for(active_isa()); }

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Isa>(forced);
  static const Isa detected = detect();
  return detected;
}

const char* isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_supported())
    throw invalid_input("force_isa: avx2 not supported on this machine");
  g_forced.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_isa() { g_forced.store(-1, std::memory_order_relaxed); }

double weighted_energy_sum(const double* a00, const double* a01,
                           const double* a10, const double* a11,
                           const double* coeff, std::size_t n,
                           const MaterialParams& p) {
  return active_backend().weighted_energy_sum(a00, a01, a10, a11, coeff, n, p);
}

void energy_values(const double* a00, const double* a01, const double* a10,
                   const double* a11, double* w, std::size_t n,
                   const MaterialParams& p) {
  active_backend().energy_values(a00, a01, a10, a11, w, n, p);
}

double weighted_energy_and_stress(const double* a00, const double* a01,
                                  const double* a10, const double* a11,
                                  const double* coeff, std::size_t n,
                                  const MaterialParams& p, double* g00,
                                  double* g01, double* g10, double* g11) {
  const double sum = active_backend().weighted_energy_and_stress(
      a00, a01, a10, a11, coeff, n, p, g00, g01, g10, g11);
  if (std::isnan(sum))
    throw singular_deformation("weighted_energy_and_stress: det A <= 0");
  return sum;
}

}  // namespace shapeflow::kern
