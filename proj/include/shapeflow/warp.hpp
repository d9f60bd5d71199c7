#pragma once

#include <array>
#include <optional>
#include <vector>

#include "shapeflow/fields.hpp"

namespace shapeflow {

// Point location in a deformed triangulation phi(mesh), backed by a uniform
// bucket grid over the deformed triangle bounding boxes. Triangles with
// non-positive orientation are never reported as containing a point.
class DeformedLocator {
public:
  explicit DeformedLocator(const Deformation& phi);

  struct Hit {
    int tri = -1;
    std::array<double, 3> bary{};
  };

  std::optional<Hit> locate(Vec2 y) const;

  // Barycentric preimage under phi (exact inverse of the piecewise affine
  // map where y is covered by phi(D)).
  std::optional<Vec2> preimage(Vec2 y) const;

  const Mesh& mesh() const { return mesh_; }

private:
  Mesh mesh_;
  std::vector<Vec2> deformed_;        // deformed vertex positions
  std::vector<double> orientation_;   // 2x signed area per triangle
  int grid_n_ = 1;
  Vec2 lo_, hi_;
  std::vector<std::vector<int>> buckets_;
};

// Image of a mask under a deformation, sampled back onto the nodal lattice.
// Each nodal value is the fraction of the node's dual cell covered by
// phi({chi >= 1/2}), estimated with a 4x4 inside/outside subsample on the
// deformed triangulation; this keeps sub-cell boundary information that a
// hard nodal binarization would destroy. Throws invalid_input if the
// deformation folds an element carrying mask support.
ShapeMask push_forward_mask(const ShapeMask& mask, const Deformation& phi,
                            bool check_orientation = true);

// Hard-thresholded variant of the mask (values {0,1}); used when emitting
// comparison metrics.
ShapeMask binarize(const ShapeMask& mask, double threshold = 0.5);

// Area of the symmetric difference between the half-level sets of two masks,
// computed by nodal counting on the common lattice.
double symmetric_difference_area(const ShapeMask& a, const ShapeMask& b);

// Nodal resample of phi^{-1}: exact barycentric preimages where x is covered
// by phi(D), moving-least-squares extension elsewhere.
Deformation invert_deformation(const Deformation& phi);

// Nodal resample of x -> outer(inner(x)), evaluations clamped to D.
Deformation compose_deformations(const Deformation& outer,
                                 const Deformation& inner);

}  // namespace shapeflow
