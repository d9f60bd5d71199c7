#pragma once

#include "shapeflow/fields.hpp"

namespace shapeflow {

// Separable Gaussian filter of standard deviation delta2 (domain units) on
// the nodal lattice. The kernel is truncated at radius 3*delta2 and
// renormalized; the boundary uses half-sample symmetric reflection, which
// preserves the total nodal mass exactly for any symmetric kernel.
// Values stay in [0,1] for mask input (convex combination of nodal values).
ScalarField gaussian_smooth(const ScalarField& f, double delta2);

inline ScalarField gaussian_smooth(const ShapeMask& m, double delta2) {
  return gaussian_smooth(m.chi, delta2);
}

}  // namespace shapeflow
