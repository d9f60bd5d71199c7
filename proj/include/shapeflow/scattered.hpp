#pragma once

#include <vector>

#include "shapeflow/fields.hpp"

namespace shapeflow {

// Moving-least-squares interpolation of scattered planar samples with linear
// reproduction: each query fits an affine model to the nearest
// neighbor_count points under Gaussian weights and evaluates it at the query.
// Exact for affine data; deterministic (ties broken by sample index).
class ScatteredField {
public:
  ScatteredField(std::vector<Vec2> points, std::vector<Vec2> values,
                 int neighbor_count = 12);

  Vec2 eval(Vec2 query) const;

  // Sample onto the nodal lattice of the given mesh.
  VectorField2 resample(const Mesh& mesh) const;

private:
  std::vector<Vec2> pts_;
  std::vector<Vec2> vals_;
  int k_;
  // uniform bucket grid over the sample bounding box
  int grid_n_ = 1;
  Vec2 lo_, hi_;
  std::vector<std::vector<int>> buckets_;

  void gather_neighbors(Vec2 q, std::vector<int>& out) const;
};

}  // namespace shapeflow
