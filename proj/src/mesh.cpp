#include "shapeflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace shapeflow {

Mesh make_mesh(int level) {
  if (level < 1 || level > 12)
    throw invalid_input("make_mesh: level must lie in [1,12], got " +
                        std::to_string(level));
  Mesh m;
  m.level = level;
  m.n = 1 << level;
  m.h = 1.0 / m.n;
  return m;
}

Mesh::Location Mesh::locate(Vec2 x) const {
  if (!contains(x)) throw invalid_input("Mesh::locate: point outside domain");
  const double sx = x.x * n;
  const double sy = x.y * n;
  int cx = std::min(static_cast<int>(sx), n - 1);
  int cy = std::min(static_cast<int>(sy), n - 1);
  const double lx = sx - cx;
  const double ly = sy - cy;

  Location loc;
  if (lx >= ly) {
    loc.tri = 2 * (cy * n + cx);
    // nodes (cx,cy), (cx+1,cy), (cx+1,cy+1): bary = (1-lx, lx-ly, ly)
    loc.bary = {1.0 - lx, lx - ly, ly};
  } else {
    loc.tri = 2 * (cy * n + cx) + 1;
    // nodes (cx,cy), (cx+1,cy+1), (cx,cy+1): bary = (1-ly, lx, ly-lx)
    loc.bary = {1.0 - ly, lx, ly - lx};
  }
  return loc;
}

}  // namespace shapeflow
