#pragma once

#include "shapeflow/material.hpp"
#include "shapeflow/matrix2.hpp"

namespace shapeflow {

/// Hyperelastic energy density of a deformation gradient.
///
/// W(A) = mu tr(A^T A) + lambda/2 (det A)^2 - (2 mu + lambda) log det A
///        - 2 mu - lambda/2
///
/// Calibrated so that W(I) = 0, DW(I) = 0 and
/// 1/2 D^2W(I)(B,B) = dissipation_rate(B); elastic energy is then a
/// second-order approximation of squared geodesic distance in the viscous
/// shape metric. Rigid body motion invariant and isotropic:
/// W(R A U) = W(A) for R, U in SO(2). Returns +infinity for det A <= 0
/// (material self-penetration barrier).
double energy_density(const Matrix2& a, const MaterialParams& p);

/// First derivative (stresses) of energy_density with respect to the matrix
/// entries. Requires det A > 0; throws singular_deformation otherwise.
Matrix2 energy_density_gradient(const Matrix2& a, const MaterialParams& p);

/// Exact bilinear second derivative D^2 W(A)(B,C); symmetric in (B,C).
/// Requires det A > 0.
double energy_density_second(const Matrix2& a, const MaterialParams& p,
                             const Matrix2& b, const Matrix2& c);

/// Local viscous dissipation rate of a velocity gradient:
/// lambda (tr eps)^2 + 2 mu tr(eps^2) with eps the symmetric part of G.
/// Always >= 0; vanishes exactly on antisymmetric gradients.
double dissipation_rate(const Matrix2& g, const MaterialParams& p);

// Scalar coefficients of D^2 W(A) as a bilinear form on 2x2 matrices:
//   D^2W(A)(B,C) = s1 B:C + s2 (cof:B)(cof:C) + s3 det_polarization(B,C).
// Shared by the Hessian assembly loops.
struct DensityCoeffs {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  Matrix2 cof;
};

DensityCoeffs density_coeffs(const Matrix2& a, const MaterialParams& p);

}  // namespace shapeflow
