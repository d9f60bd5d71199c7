#pragma once

#include <array>
#include <cstdint>

#include "shapeflow/errors.hpp"
#include "shapeflow/matrix2.hpp"

namespace shapeflow {

// Regular simplicial mesh on the unit square D = [0,1]^2. The lattice has
// (2^level + 1)^2 vertices; every grid cell is split into two triangles along
// the lower-left to upper-right diagonal (fixed for determinism). The mesh is
// fully determined by its level, so this is a cheap value type.
//
// Triangle ids: cell c = cy*n + cx holds triangles 2c (lower) and 2c+1
// (upper). Lower triangle nodes: (cx,cy), (cx+1,cy), (cx+1,cy+1); upper:
// (cx,cy), (cx+1,cy+1), (cx,cy+1). Both orientations are positive.
struct Mesh {
  int level = 0;
  int n = 0;        // cells per side, 2^level
  double h = 0.0;   // grid size 2^-level

  Mesh() = default;

  int nodes_per_side() const { return n + 1; }
  int vertex_count() const { return (n + 1) * (n + 1); }
  int triangle_count() const { return 2 * n * n; }
  double triangle_area() const { return 0.5 * h * h; }

  int vertex_index(int ix, int iy) const { return iy * (n + 1) + ix; }
  Vec2 vertex_position(int v) const {
    return {(v % (n + 1)) * h, (v / (n + 1)) * h};
  }

  std::array<int, 3> triangle_nodes(int t) const {
    const int cell = t >> 1;
    const int cx = cell % n;
    const int cy = cell / n;
    const int v00 = vertex_index(cx, cy);
    const int v10 = v00 + 1;
    const int v01 = v00 + (n + 1);
    const int v11 = v01 + 1;
    if ((t & 1) == 0) return {v00, v10, v11};
    return {v00, v11, v01};
  }

  // Gradients of the three barycentric basis functions; constant per triangle
  // and identical for all triangles of the same parity.
  std::array<Vec2, 3> basis_gradients(int t) const {
    const double inv_h = 1.0 / h;
    if ((t & 1) == 0)
      return {Vec2{-inv_h, 0.0}, Vec2{inv_h, -inv_h}, Vec2{0.0, inv_h}};
    return {Vec2{0.0, -inv_h}, Vec2{inv_h, 0.0}, Vec2{-inv_h, inv_h}};
  }

  // Containing triangle and barycentric coordinates of a point in D.
  // Points on shared edges resolve deterministically.
  struct Location {
    int tri = -1;
    std::array<double, 3> bary{};
  };
  Location locate(Vec2 x) const;

  bool contains(Vec2 x) const {
    return x.x >= 0.0 && x.x <= 1.0 && x.y >= 0.0 && x.y <= 1.0;
  }
};

Mesh make_mesh(int level);

inline Vec2 clamp_to_domain(Vec2 x) {
  return {x.x < 0.0 ? 0.0 : (x.x > 1.0 ? 1.0 : x.x),
          x.y < 0.0 ? 0.0 : (x.y > 1.0 ? 1.0 : x.y)};
}

}  // namespace shapeflow
