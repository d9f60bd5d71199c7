#include "shapeflow/energy.hpp"

#include <cmath>
#include <limits>

namespace shapeflow {

double energy_density(const Matrix2& a, const MaterialParams& p) {
  if (!a.finite()) throw invalid_input("energy_density: non-finite matrix entry");
  const double j = a.det();
  if (j <= 0.0) return std::numeric_limits<double>::infinity();
  return p.mu * a.frobenius_sq() + 0.5 * p.lambda * j * j -
         (2.0 * p.mu + p.lambda) * std::log(j) - 2.0 * p.mu - 0.5 * p.lambda;
}

Matrix2 energy_density_gradient(const Matrix2& a, const MaterialParams& p) {
  if (!a.finite())
    throw invalid_input("energy_density_gradient: non-finite matrix entry");
  const double j = a.det();
  if (j <= 0.0)
    throw singular_deformation("energy_density_gradient: det A <= 0");
  const double gj = p.lambda * j - (2.0 * p.mu + p.lambda) / j;
  return 2.0 * p.mu * a + gj * a.cofactor();
}

DensityCoeffs density_coeffs(const Matrix2& a, const MaterialParams& p) {
  const double j = a.det();
  if (j <= 0.0) throw singular_deformation("density_coeffs: det A <= 0");
  DensityCoeffs c;
  c.s1 = 2.0 * p.mu;
  c.s2 = p.lambda + (2.0 * p.mu + p.lambda) / (j * j);
  c.s3 = p.lambda * j - (2.0 * p.mu + p.lambda) / j;
  c.cof = a.cofactor();
  return c;
}

double energy_density_second(const Matrix2& a, const MaterialParams& p,
                             const Matrix2& b, const Matrix2& c) {
  if (!a.finite() || !b.finite() || !c.finite())
    throw invalid_input("energy_density_second: non-finite matrix entry");
  const DensityCoeffs k = density_coeffs(a, p);
  return k.s1 * b.ddot(c) + k.s2 * k.cof.ddot(b) * k.cof.ddot(c) +
         k.s3 * det_polarization(b, c);
}

double dissipation_rate(const Matrix2& g, const MaterialParams& p) {
  if (!g.finite()) throw invalid_input("dissipation_rate: non-finite matrix entry");
  const double e00 = g.a00;
  const double e11 = g.a11;
  const double e01 = 0.5 * (g.a01 + g.a10);
  const double tr = e00 + e11;
  const double tr_sq = e00 * e00 + e11 * e11 + 2.0 * e01 * e01;
  return p.lambda * tr * tr + 2.0 * p.mu * tr_sq;
}

}  // namespace shapeflow
