#pragma once

#include <string>
#include <vector>

#include "shapeflow/mesh.hpp"

namespace shapeflow {

// Piecewise affine nodal scalar field on a Mesh.
struct ScalarField {
  Mesh mesh;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Mesh& m, double fill = 0.0)
      : mesh(m), v(m.vertex_count(), fill) {}

  double eval(Vec2 x) const {
    const Mesh::Location loc = mesh.locate(x);
    const auto nodes = mesh.triangle_nodes(loc.tri);
    return loc.bary[0] * v[nodes[0]] + loc.bary[1] * v[nodes[1]] +
           loc.bary[2] * v[nodes[2]];
  }

  Vec2 element_gradient(int t) const {
    const auto nodes = mesh.triangle_nodes(t);
    const auto g = mesh.basis_gradients(t);
    Vec2 out;
    for (int i = 0; i < 3; ++i) out += v[nodes[i]] * g[i];
    return out;
  }
};

// Piecewise affine nodal planar field; components stored separately.
struct VectorField2 {
  Mesh mesh;
  std::vector<double> x;
  std::vector<double> y;

  VectorField2() = default;
  explicit VectorField2(const Mesh& m)
      : mesh(m), x(m.vertex_count(), 0.0), y(m.vertex_count(), 0.0) {}

  Vec2 node(int v) const { return {x[v], y[v]}; }
  void set_node(int v, Vec2 val) {
    x[v] = val.x;
    y[v] = val.y;
  }

  Vec2 eval(Vec2 p) const {
    const Mesh::Location loc = mesh.locate(p);
    const auto nodes = mesh.triangle_nodes(loc.tri);
    Vec2 out;
    for (int i = 0; i < 3; ++i) out += loc.bary[i] * node(nodes[i]);
    return out;
  }

  // Constant Jacobian of the affine map on triangle t; M[a][b] = d u_a / d x_b.
  Matrix2 element_gradient(int t) const {
    const auto nodes = mesh.triangle_nodes(t);
    const auto g = mesh.basis_gradients(t);
    Matrix2 m = Matrix2::zero();
    for (int i = 0; i < 3; ++i) {
      const Vec2 u = node(nodes[i]);
      m.a00 += u.x * g[i].x;
      m.a01 += u.x * g[i].y;
      m.a10 += u.y * g[i].x;
      m.a11 += u.y * g[i].y;
    }
    return m;
  }
};

// Displacement field u; the deformation is phi = id + u.
struct Deformation {
  VectorField2 u;

  Deformation() = default;
  explicit Deformation(const Mesh& m) : u(m) {}

  const Mesh& mesh() const { return u.mesh; }

  Vec2 apply(Vec2 p) const { return p + u.eval(p); }
  Vec2 apply_node(int v) const { return u.mesh.vertex_position(v) + u.node(v); }

  // 1 + grad u on triangle t.
  Matrix2 gradient(int t) const {
    Matrix2 g = u.element_gradient(t);
    g.a00 += 1.0;
    g.a11 += 1.0;
    return g;
  }

  double max_displacement() const {
    double m = 0.0;
    for (std::size_t i = 0; i < u.x.size(); ++i)
      m = std::max(m, Vec2(u.x[i], u.y[i]).norm());
    return m;
  }
};

// Approximate characteristic function of an object; nodal values in [0,1].
struct ShapeMask {
  ScalarField chi;
  std::string source;  // provenance, e.g. input image path

  ShapeMask() = default;
  explicit ShapeMask(const Mesh& m, double fill = 0.0) : chi(m, fill) {}

  const Mesh& mesh() const { return chi.mesh; }

  void validate() const {
    for (double x : chi.v)
      if (!(x >= 0.0 && x <= 1.0))
        throw invalid_input("ShapeMask: nodal value outside [0,1]");
  }

  double area() const {
    // Exact integral of the piecewise affine interpolant.
    double sum = 0.0;
    const Mesh& m = chi.mesh;
    for (int t = 0; t < m.triangle_count(); ++t) {
      const auto nodes = m.triangle_nodes(t);
      sum += (chi.v[nodes[0]] + chi.v[nodes[1]] + chi.v[nodes[2]]) / 3.0;
    }
    return sum * m.triangle_area();
  }

  bool empty() const {
    for (double x : chi.v)
      if (x >= 0.5) return false;
    return true;
  }
};

// Evaluation of f at phi(x), with phi(x) projected back onto the boundary of
// D (componentwise clamp, the closest-point projection onto the square)
// whenever it leaves the domain.
double pullback_eval(const ScalarField& f, const Deformation& phi, Vec2 x);
Vec2 pullback_eval(const VectorField2& f, const Deformation& phi, Vec2 x);

// Nodal interpolation onto the next dyadic level; exact as a function on D.
ScalarField prolongate(const ScalarField& f);
VectorField2 prolongate(const VectorField2& f);
Deformation prolongate(const Deformation& d);
ShapeMask prolongate(const ShapeMask& m);

// Restriction to a coarser level by lattice subsampling.
ScalarField restrict_to_level(const ScalarField& f, int level);
VectorField2 restrict_to_level(const VectorField2& f, int level);
Deformation restrict_to_level(const Deformation& d, int level);
ShapeMask restrict_to_level(const ShapeMask& m, int level);

}  // namespace shapeflow
