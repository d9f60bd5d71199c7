#pragma once

#include <string>
#include <vector>

#include "shapeflow/geodesic.hpp"

namespace shapeflow {

// Displacement field on a base shape: the discrete tangent-vector proxy.
// Values outside the shape are the finite element extension of the field and
// carry no meaning of their own.
struct ShapeVariation {
  ShapeMask base;
  VectorField2 zeta;

  void validate() const;
};

// Discrete 1/K-logarithm: the first matching displacement of a converged
// order-K geodesic from source to target, resampled onto the computational
// lattice by moving least squares over the deformed base points. K times the
// result approximates the Riemannian logarithm.
//
// If cfg.schedule is empty a default cascade ending at (source level, K) is
// used; otherwise the schedule's final K must equal K.
ShapeVariation shape_log(const ShapeMask& source, const ShapeMask& target,
                         int K, const SolverConfig& cfg,
                         const MaterialParams& p);

// First-order exponential: the image mask of the base under id + zeta.
ShapeMask shape_exp1(const ShapeVariation& v);

// Second-order exponential: solves the weak-form optimality condition for
// the continuation deformation psi2 (damped Newton with the rigid gauge of
// the update fixed by zero-mean displacement/rotation constraints) and
// returns (psi2 o (id + zeta))(base). Throws step_too_large if the variation
// exceeds the smallness guard or Newton diverges (callers subdivide).
struct Exp2Result {
  ShapeMask shape;
  Deformation psi2;      // continuation map acting at (id+zeta) positions
  Deformation full_map;  // (psi2 o (id + zeta)), nodally composed
};
Exp2Result shape_exp2_detailed(const ShapeVariation& v, const SolverConfig& cfg,
                               const MaterialParams& p);
ShapeMask shape_exp2(const ShapeVariation& v, const SolverConfig& cfg,
                     const MaterialParams& p);

// Discrete geodesic flow O_1..O_k: repeated Exp2 steps, each consecutive
// triple a discrete 2-geodesic; step j >= 3 retrieves its direction as the
// Log1 matching displacement between the two previous shapes.
struct ExpFlowResult {
  std::vector<ShapeMask> shapes;       // O_1..O_k
  std::vector<Deformation> step_maps;  // map O_{j-1} -> O_j per step
};
ExpFlowResult shape_exp_flow(const ShapeVariation& v, int k,
                             const SolverConfig& cfg, const MaterialParams& p);
std::vector<ShapeMask> shape_exp(const ShapeVariation& v, int k,
                                 const SolverConfig& cfg,
                                 const MaterialParams& p);

// Variation files: a VFLD 2-component field plus a JSON sidecar manifest
// naming the field file and the base mask image.
void save_variation(const ShapeVariation& v, const std::string& manifest_path);
ShapeVariation load_variation(const std::string& manifest_path);

// Maximum displacement magnitude over nodes with mask support.
double variation_sup_norm(const ShapeVariation& v);

}  // namespace shapeflow
