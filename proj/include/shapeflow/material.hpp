#pragma once

#include "shapeflow/errors.hpp"

namespace shapeflow {

// Viscosity/elasticity coefficients and regularization constants.
// Defaults follow the published algorithm parameters; delta2 usually tracks
// the grid size of the current mesh level (see SolverConfig::delta2_tracks_h).
struct MaterialParams {
  double lambda = 1.0;    // dilatational weight, >= 0
  double mu = 1.0;        // shear weight, > 0
  double delta1 = 0.01;   // outside-material softening, in (0,1)
  double delta2 = 1.0 / 64.0;  // Gaussian filter width, domain units, > 0
  double delta3 = 0.01;   // deformation regularizer weight, >= 0
  double epsilon = 0.1;   // mismatch penalty scale, > 0

  void validate() const {
    if (!(lambda >= 0.0)) throw invalid_input("MaterialParams: lambda must be >= 0");
    if (!(mu > 0.0)) throw invalid_input("MaterialParams: mu must be > 0");
    if (!(delta1 > 0.0 && delta1 < 1.0))
      throw invalid_input("MaterialParams: delta1 must lie in (0,1)");
    if (!(delta2 > 0.0)) throw invalid_input("MaterialParams: delta2 must be > 0");
    if (!(delta3 >= 0.0)) throw invalid_input("MaterialParams: delta3 must be >= 0");
    if (!(epsilon > 0.0)) throw invalid_input("MaterialParams: epsilon must be > 0");
  }

  MaterialParams with_delta2(double d2) const {
    MaterialParams p = *this;
    p.delta2 = d2;
    return p;
  }
};

}  // namespace shapeflow
