#pragma once

// Shared fixtures and independent oracles for the test suites. The finite
// difference oracles here are the reference against which analytic
// derivatives are checked; they must not share code with the implementation
// paths they validate.

#include <cmath>
#include <functional>
#include <random>

#include "shapeflow/energy.hpp"
#include "shapeflow/fields.hpp"

namespace sftest {

using namespace shapeflow;

inline std::mt19937 rng(unsigned seed = 42) { return std::mt19937(seed); }

inline double uniform(std::mt19937& g, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(g);
}

inline Matrix2 random_matrix(std::mt19937& g, double lo = -1.0, double hi = 1.0) {
  return {uniform(g, lo, hi), uniform(g, lo, hi), uniform(g, lo, hi),
          uniform(g, lo, hi)};
}

// Random matrix with determinant in the given range, rejection sampled.
inline Matrix2 random_positive_matrix(std::mt19937& g, double det_lo = 0.2,
                                      double det_hi = 5.0) {
  for (;;) {
    Matrix2 a = random_matrix(g, -1.5, 1.5);
    a.a00 += 1.0;
    a.a11 += 1.0;
    const double d = a.det();
    if (d >= det_lo && d <= det_hi) return a;
  }
}

inline Matrix2 unit_entry(int i) {
  Matrix2 e = Matrix2::zero();
  if (i == 0) e.a00 = 1.0;
  if (i == 1) e.a01 = 1.0;
  if (i == 2) e.a10 = 1.0;
  if (i == 3) e.a11 = 1.0;
  return e;
}

// Central finite differences of the energy density, entry by entry.
inline Matrix2 fd_density_gradient(const Matrix2& a, const MaterialParams& p,
                                   double step = 1e-5) {
  Matrix2 g = Matrix2::zero();
  for (int i = 0; i < 4; ++i) {
    const Matrix2 e = unit_entry(i);
    const double d = (energy_density(a + step * e, p) -
                      energy_density(a - step * e, p)) /
                     (2.0 * step);
    g += d * e;
  }
  return g;
}

// Second directional difference approximating D^2W(A)(B,C).
inline double fd_density_second(const Matrix2& a, const MaterialParams& p,
                                const Matrix2& b, const Matrix2& c,
                                double step = 1e-4) {
  const auto w = [&](double s, double t) {
    return energy_density(a + s * b + t * c, p);
  };
  return (w(step, step) - w(step, -step) - w(-step, step) + w(-step, -step)) /
         (4.0 * step * step);
}

// Centered disk mask on the nodal lattice (hard characteristic function).
inline ShapeMask disk_mask(int level, Vec2 center, double radius) {
  const Mesh mesh = make_mesh(level);
  ShapeMask m(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 x = mesh.vertex_position(v);
    m.chi.v[v] = (x - center).norm() <= radius ? 1.0 : 0.0;
  }
  return m;
}

inline ShapeMask rect_mask(int level, Vec2 lo, Vec2 hi) {
  const Mesh mesh = make_mesh(level);
  ShapeMask m(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 x = mesh.vertex_position(v);
    m.chi.v[v] =
        (x.x >= lo.x && x.x <= hi.x && x.y >= lo.y && x.y <= hi.y) ? 1.0 : 0.0;
  }
  return m;
}

// Block letter 'L': vertical stroke plus foot.
inline ShapeMask letter_l_mask(int level, Vec2 origin = {0.3, 0.25},
                               double w = 0.12, double ht = 0.5,
                               double foot = 0.3) {
  const Mesh mesh = make_mesh(level);
  ShapeMask m(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 x = mesh.vertex_position(v);
    const bool stroke = x.x >= origin.x && x.x <= origin.x + w &&
                        x.y >= origin.y && x.y <= origin.y + ht;
    const bool base = x.x >= origin.x && x.x <= origin.x + foot &&
                      x.y >= origin.y && x.y <= origin.y + w;
    m.chi.v[v] = (stroke || base) ? 1.0 : 0.0;
  }
  return m;
}

// Smooth low-frequency displacement field for derivative tests; amplitude in
// domain units. Includes constant terms so domain-boundary images sit
// strictly on one side of the clamp (finite differences would otherwise
// straddle the clamp kink).
inline Deformation smooth_random_deformation(const Mesh& mesh, std::mt19937& g,
                                             double amplitude) {
  Deformation d(mesh);
  const double a1 = uniform(g, -1.0, 1.0), a2 = uniform(g, -1.0, 1.0);
  const double a3 = uniform(g, 0.2, 1.0) * (uniform(g, -1, 1) < 0 ? -1 : 1);
  const double b1 = uniform(g, -1.0, 1.0), b2 = uniform(g, -1.0, 1.0);
  const double b3 = uniform(g, 0.2, 1.0) * (uniform(g, -1, 1) < 0 ? -1 : 1);
  const double p1 = uniform(g, 0.0, 6.28), p2 = uniform(g, 0.0, 6.28);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 x = mesh.vertex_position(v);
    d.u.x[v] = amplitude * (a1 * std::sin(2.0 * M_PI * x.x + p1) *
                                std::cos(M_PI * x.y) +
                            a2 * std::sin(M_PI * x.y) + 0.31 * a3);
    d.u.y[v] = amplitude * (b1 * std::cos(2.0 * M_PI * x.y + p2) *
                                std::sin(M_PI * x.x) +
                            b2 * std::sin(M_PI * x.x) + 0.29 * b3);
  }
  return d;
}

// 4-connected component count of the thresholded foreground (or background).
inline int component_count(const ShapeMask& mask, bool foreground = true) {
  const Mesh& mesh = mask.mesh();
  const int m = mesh.nodes_per_side();
  std::vector<int> label(m * m, -1);
  auto is_set = [&](int ix, int iy) {
    const bool in = mask.chi.v[mesh.vertex_index(ix, iy)] >= 0.5;
    return foreground ? in : !in;
  };
  int count = 0;
  std::vector<std::pair<int, int>> stack;
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < m; ++ix) {
      if (!is_set(ix, iy) || label[iy * m + ix] >= 0) continue;
      ++count;
      stack.push_back({ix, iy});
      label[iy * m + ix] = count;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        const int dx[4] = {1, -1, 0, 0};
        const int dy[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          const int nx = cx + dx[d], ny = cy + dy[d];
          if (nx < 0 || ny < 0 || nx >= m || ny >= m) continue;
          if (!is_set(nx, ny) || label[ny * m + nx] >= 0) continue;
          label[ny * m + nx] = count;
          stack.push_back({nx, ny});
        }
      }
    }
  return count;
}

}  // namespace sftest
