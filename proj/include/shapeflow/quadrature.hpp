#pragma once

#include <array>

#include "shapeflow/mesh.hpp"

namespace shapeflow {

// Seven-point Simpson-style triangle rule, exact for cubics: the three
// vertices (1/20 each), the three edge midpoints (2/15 each), and the
// centroid (9/20), all times the triangle area. Vertex coverage matters
// here: extremal values of piecewise affine deformation gradients occur in
// element corners, and a rule without corner points can miss an incipient
// fold during energy minimization.
struct QuadPoint {
  Vec2 x;
  double w = 0.0;       // absolute weight (includes the area factor)
  std::array<double, 3> bary{};
};

inline std::array<QuadPoint, 7> quadrature_points(const Mesh& mesh, int t) {
  const auto nodes = mesh.triangle_nodes(t);
  const Vec2 p0 = mesh.vertex_position(nodes[0]);
  const Vec2 p1 = mesh.vertex_position(nodes[1]);
  const Vec2 p2 = mesh.vertex_position(nodes[2]);
  const double area = mesh.triangle_area();
  const double wv = area / 20.0;
  const double wm = area * 2.0 / 15.0;
  const double wc = area * 9.0 / 20.0;
  const double third = 1.0 / 3.0;

  return {QuadPoint{p0, wv, {1.0, 0.0, 0.0}},
          QuadPoint{p1, wv, {0.0, 1.0, 0.0}},
          QuadPoint{p2, wv, {0.0, 0.0, 1.0}},
          QuadPoint{(p0 + p1) * 0.5, wm, {0.5, 0.5, 0.0}},
          QuadPoint{(p1 + p2) * 0.5, wm, {0.0, 0.5, 0.5}},
          QuadPoint{(p0 + p2) * 0.5, wm, {0.5, 0.0, 0.5}},
          QuadPoint{(p0 + p1 + p2) * third, wc, {third, third, third}}};
}

}  // namespace shapeflow
