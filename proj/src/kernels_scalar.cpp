#include <cmath>
#include <limits>

#include "shapeflow/kernels.hpp"

namespace shapeflow::kern::detail {

namespace {

double scalar_weighted_energy_sum(const double* a00, const double* a01,
                                  const double* a10, const double* a11,
                                  const double* coeff, std::size_t n,
                                  const MaterialParams& p) {
  const double c_log = 2.0 * p.mu + p.lambda;
  const double c0 = 2.0 * p.mu + 0.5 * p.lambda;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double j = a00[i] * a11[i] - a01[i] * a10[i];
    if (j <= 0.0) return std::numeric_limits<double>::infinity();
    const double frob = a00[i] * a00[i] + a01[i] * a01[i] + a10[i] * a10[i] +
                        a11[i] * a11[i];
    acc += coeff[i] *
           (p.mu * frob + 0.5 * p.lambda * j * j - c_log * std::log(j) - c0);
  }
  return acc;
}

void scalar_energy_values(const double* a00, const double* a01,
                          const double* a10, const double* a11, double* w,
                          std::size_t n, const MaterialParams& p) {
  const double c_log = 2.0 * p.mu + p.lambda;
  const double c0 = 2.0 * p.mu + 0.5 * p.lambda;
  for (std::size_t i = 0; i < n; ++i) {
    const double j = a00[i] * a11[i] - a01[i] * a10[i];
    if (j <= 0.0) {
      w[i] = std::numeric_limits<double>::infinity();
      continue;
    }
    const double frob = a00[i] * a00[i] + a01[i] * a01[i] + a10[i] * a10[i] +
                        a11[i] * a11[i];
    w[i] = p.mu * frob + 0.5 * p.lambda * j * j - c_log * std::log(j) - c0;
  }
}

double scalar_weighted_energy_and_stress(const double* a00, const double* a01,
                                         const double* a10, const double* a11,
                                         const double* coeff, std::size_t n,
                                         const MaterialParams& p, double* g00,
                                         double* g01, double* g10,
                                         double* g11) {
  const double c_log = 2.0 * p.mu + p.lambda;
  const double c0 = 2.0 * p.mu + 0.5 * p.lambda;
  const double two_mu = 2.0 * p.mu;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double j = a00[i] * a11[i] - a01[i] * a10[i];
    if (j <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double frob = a00[i] * a00[i] + a01[i] * a01[i] + a10[i] * a10[i] +
                        a11[i] * a11[i];
    const double c = coeff[i];
    acc += c * (p.mu * frob + 0.5 * p.lambda * j * j - c_log * std::log(j) - c0);
    const double gj = p.lambda * j - c_log / j;
    g00[i] = c * (two_mu * a00[i] + gj * a11[i]);
    g01[i] = c * (two_mu * a01[i] - gj * a10[i]);
    g10[i] = c * (two_mu * a10[i] - gj * a01[i]);
    g11[i] = c * (two_mu * a11[i] + gj * a00[i]);
  }
  return acc;
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend b{scalar_weighted_energy_sum, scalar_energy_values,
                         scalar_weighted_energy_and_stress};
  return b;
}

}  // namespace shapeflow::kern::detail
