#include "shapeflow/fields.hpp"

namespace shapeflow {

double pullback_eval(const ScalarField& f, const Deformation& phi, Vec2 x) {
  return f.eval(clamp_to_domain(phi.apply(x)));
}

Vec2 pullback_eval(const VectorField2& f, const Deformation& phi, Vec2 x) {
  return f.eval(clamp_to_domain(phi.apply(x)));
}

namespace {

// Every fine node lies on a vertex, an edge midpoint, or a diagonal midpoint
// of the coarse triangulation, so nodal interpolation reproduces the coarse
// function exactly.
template <class Get, class Set>
void prolongate_nodal(const Mesh& coarse, const Mesh& fine, Get get, Set set) {
  const int nf = fine.n;
  for (int iy = 0; iy <= nf; ++iy) {
    for (int ix = 0; ix <= nf; ++ix) {
      const int v = fine.vertex_index(ix, iy);
      const bool ex = (ix & 1) == 0;
      const bool ey = (iy & 1) == 0;
      if (ex && ey) {
        set(v, get(coarse.vertex_index(ix / 2, iy / 2)));
      } else if (!ex && ey) {
        const int a = coarse.vertex_index(ix / 2, iy / 2);
        set(v, 0.5 * (get(a) + get(a + 1)));
      } else if (ex && !ey) {
        const int a = coarse.vertex_index(ix / 2, iy / 2);
        set(v, 0.5 * (get(a) + get(a + coarse.n + 1)));
      } else {
        // cell center: midpoint of the lower-left/upper-right diagonal
        const int a = coarse.vertex_index(ix / 2, iy / 2);
        set(v, 0.5 * (get(a) + get(a + coarse.n + 2)));
      }
    }
  }
}

}  // namespace

ScalarField prolongate(const ScalarField& f) {
  const Mesh fine = make_mesh(f.mesh.level + 1);
  ScalarField out(fine);
  prolongate_nodal(
      f.mesh, fine, [&](int v) { return f.v[v]; },
      [&](int v, double val) { out.v[v] = val; });
  return out;
}

VectorField2 prolongate(const VectorField2& f) {
  const Mesh fine = make_mesh(f.mesh.level + 1);
  VectorField2 out(fine);
  prolongate_nodal(
      f.mesh, fine, [&](int v) { return f.node(v); },
      [&](int v, Vec2 val) { out.set_node(v, val); });
  return out;
}

Deformation prolongate(const Deformation& d) {
  Deformation out;
  out.u = prolongate(d.u);
  return out;
}

ShapeMask prolongate(const ShapeMask& m) {
  ShapeMask out;
  out.chi = prolongate(m.chi);
  out.source = m.source;
  return out;
}

namespace {

int subsample_stride(int from_level, int to_level) {
  if (to_level > from_level)
    throw invalid_input("restrict_to_level: target level finer than source");
  return 1 << (from_level - to_level);
}

}  // namespace

ScalarField restrict_to_level(const ScalarField& f, int level) {
  if (level == f.mesh.level) return f;
  const int s = subsample_stride(f.mesh.level, level);
  const Mesh coarse = make_mesh(level);
  ScalarField out(coarse);
  for (int iy = 0; iy <= coarse.n; ++iy)
    for (int ix = 0; ix <= coarse.n; ++ix)
      out.v[coarse.vertex_index(ix, iy)] =
          f.v[f.mesh.vertex_index(ix * s, iy * s)];
  return out;
}

VectorField2 restrict_to_level(const VectorField2& f, int level) {
  if (level == f.mesh.level) return f;
  const int s = subsample_stride(f.mesh.level, level);
  const Mesh coarse = make_mesh(level);
  VectorField2 out(coarse);
  for (int iy = 0; iy <= coarse.n; ++iy)
    for (int ix = 0; ix <= coarse.n; ++ix)
      out.set_node(coarse.vertex_index(ix, iy),
                   f.node(f.mesh.vertex_index(ix * s, iy * s)));
  return out;
}

Deformation restrict_to_level(const Deformation& d, int level) {
  Deformation out;
  out.u = restrict_to_level(d.u, level);
  return out;
}

ShapeMask restrict_to_level(const ShapeMask& m, int level) {
  ShapeMask out;
  out.chi = restrict_to_level(m.chi, level);
  out.source = m.source;
  return out;
}

}  // namespace shapeflow
