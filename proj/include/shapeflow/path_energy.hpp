#pragma once

#include <vector>

#include "shapeflow/energy.hpp"
#include "shapeflow/fields.hpp"

namespace shapeflow {

// A discrete path of K+1 shapes, parameterized by deformations over
// reference shapes: shape k is defs[k](refs[k]). matchings[k-1] carries the
// reference matching from refs[k-1] onto refs[k]; the effective matching
// between consecutive shapes is defs[k] o matchings[k-1] o defs[k-1]^{-1}.
struct DiscretePath {
  int K = 0;
  Mesh mesh;
  std::vector<ShapeMask> refs;         // K+1
  std::vector<Deformation> matchings;  // K, matchings[k-1]: refs[k-1] -> refs[k]
  std::vector<Deformation> defs;       // K+1 parameterizing deformations

  static DiscretePath identity(const ShapeMask& source, int K);

  void validate() const;
};

struct EnergyBreakdown {
  std::vector<double> pair;  // W_k for k = 1..K, without the 1/tau weight
  std::vector<double> reg;   // delta3-weighted regularizer per deformation
  double penalty0 = 0.0;
  double penaltyK = 0.0;
  double total = 0.0;  // K * sum(pair) + sum(reg) + penalty0 + penaltyK

  double pair_sum() const;
  double reg_sum() const;
};

// Elastic energy of the step from shape (ref, prev) to (ref_next, next)
// through the reference matching:
//   int_D chi^{delta1}_ref W( grad(next o matching) (grad prev)^{-1} )
//         det(grad prev) dx
// with chi^{delta1} = (1-delta1) chi + delta1 (softer material outside the
// object). grad(next) is pulled back to the matching-image quadrature points
// through the piecewise constant element gradients, image points clamped to
// D. Returns +infinity when any composed gradient has non-positive det.
double pair_energy(const ShapeMask& ref, const Deformation& matching,
                   const Deformation& prev, const Deformation& next,
                   const MaterialParams& p);

// (1/epsilon) int_D ( G_{delta2}*chi_ref - (G_{delta2}*chi_target) o phi )^2
double mismatch_penalty(const ShapeMask& ref, const ShapeMask& target,
                        const Deformation& phi, const MaterialParams& p);

// delta3 * int_D W(grad phi); +infinity on any folded element. Keeps each
// parameterizing deformation individually regular.
double deformation_regularizer(const Deformation& phi, const MaterialParams& p);

EnergyBreakdown total_energy(const DiscretePath& path, const ShapeMask& source,
                             const ShapeMask& target, const MaterialParams& p);

// L = sum sqrt(W_k), E = (1/tau) sum W_k from the pair energies alone.
double discrete_length(const DiscretePath& path, const MaterialParams& p);
double discrete_energy(const DiscretePath& path, const MaterialParams& p);
std::vector<double> pair_energies(const DiscretePath& path,
                                  const MaterialParams& p);

// Shapes along the path: defs[k](refs[k]).
std::vector<ShapeMask> path_shapes(const DiscretePath& path);

// det of the composed matching gradient at every quadrature point of every
// step; true iff all are positive (topology preservation certificate).
bool composed_gradients_regular(const DiscretePath& path);

// Per-element mean of the pair-energy integrand for step k (1-based);
// the local-dissipation heat map data.
std::vector<double> pair_energy_element_density(const DiscretePath& path,
                                                int k, const MaterialParams& p);

}  // namespace shapeflow
