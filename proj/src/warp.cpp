#include "shapeflow/warp.hpp"

#include <algorithm>
#include <cmath>

#include "shapeflow/scattered.hpp"

namespace shapeflow {

DeformedLocator::DeformedLocator(const Deformation& phi) : mesh_(phi.mesh()) {
  const int nv = mesh_.vertex_count();
  deformed_.resize(nv);
  for (int v = 0; v < nv; ++v) deformed_[v] = phi.apply_node(v);

  lo_ = hi_ = deformed_[0];
  for (const Vec2& p : deformed_) {
    lo_.x = std::min(lo_.x, p.x);
    lo_.y = std::min(lo_.y, p.y);
    hi_.x = std::max(hi_.x, p.x);
    hi_.y = std::max(hi_.y, p.y);
  }
  const double pad = 1e-12 + 1e-9 * std::max(hi_.x - lo_.x, hi_.y - lo_.y);
  lo_ -= Vec2(pad, pad);
  hi_ += Vec2(pad, pad);

  grid_n_ = std::max(1, mesh_.n);
  buckets_.assign(grid_n_ * grid_n_, {});
  const int nt = mesh_.triangle_count();
  orientation_.resize(nt);
  const double sx = grid_n_ / (hi_.x - lo_.x);
  const double sy = grid_n_ / (hi_.y - lo_.y);
  for (int t = 0; t < nt; ++t) {
    const auto nodes = mesh_.triangle_nodes(t);
    const Vec2 q0 = deformed_[nodes[0]];
    const Vec2 q1 = deformed_[nodes[1]];
    const Vec2 q2 = deformed_[nodes[2]];
    orientation_[t] = (q1 - q0).cross(q2 - q0);
    const double x0 = std::min({q0.x, q1.x, q2.x});
    const double x1 = std::max({q0.x, q1.x, q2.x});
    const double y0 = std::min({q0.y, q1.y, q2.y});
    const double y1 = std::max({q0.y, q1.y, q2.y});
    const int bx0 = std::clamp(static_cast<int>((x0 - lo_.x) * sx), 0, grid_n_ - 1);
    const int bx1 = std::clamp(static_cast<int>((x1 - lo_.x) * sx), 0, grid_n_ - 1);
    const int by0 = std::clamp(static_cast<int>((y0 - lo_.y) * sy), 0, grid_n_ - 1);
    const int by1 = std::clamp(static_cast<int>((y1 - lo_.y) * sy), 0, grid_n_ - 1);
    for (int by = by0; by <= by1; ++by)
      for (int bx = bx0; bx <= bx1; ++bx)
        buckets_[by * grid_n_ + bx].push_back(t);
  }
}

std::optional<DeformedLocator::Hit> DeformedLocator::locate(Vec2 y) const {
  if (y.x < lo_.x || y.x > hi_.x || y.y < lo_.y || y.y > hi_.y)
    return std::nullopt;
  const int bx = std::clamp(
      static_cast<int>((y.x - lo_.x) / (hi_.x - lo_.x) * grid_n_), 0,
      grid_n_ - 1);
  const int by = std::clamp(
      static_cast<int>((y.y - lo_.y) / (hi_.y - lo_.y) * grid_n_), 0,
      grid_n_ - 1);
  const double tol = -1e-12;
  for (int t : buckets_[by * grid_n_ + bx]) {
    if (orientation_[t] <= 0.0) continue;
    const auto nodes = mesh_.triangle_nodes(t);
    const Vec2 q0 = deformed_[nodes[0]];
    const Vec2 q1 = deformed_[nodes[1]];
    const Vec2 q2 = deformed_[nodes[2]];
    const double inv = 1.0 / orientation_[t];
    const double b0 = (q1 - y).cross(q2 - y) * inv;
    const double b1 = (q2 - y).cross(q0 - y) * inv;
    const double b2 = (q0 - y).cross(q1 - y) * inv;
    if (b0 >= tol && b1 >= tol && b2 >= tol)
      return Hit{t, {b0, b1, b2}};
  }
  return std::nullopt;
}

std::optional<Vec2> DeformedLocator::preimage(Vec2 y) const {
  const auto hit = locate(y);
  if (!hit) return std::nullopt;
  const auto nodes = mesh_.triangle_nodes(hit->tri);
  Vec2 p;
  for (int i = 0; i < 3; ++i)
    p += hit->bary[i] * mesh_.vertex_position(nodes[i]);
  return p;
}

ShapeMask push_forward_mask(const ShapeMask& mask, const Deformation& phi,
                            bool check_orientation) {
  const Mesh& mesh = mask.mesh();
  const DeformedLocator locator(phi);

  if (check_orientation) {
    for (int t = 0; t < mesh.triangle_count(); ++t) {
      const auto nodes = mesh.triangle_nodes(t);
      const double support = std::max(
          {mask.chi.v[nodes[0]], mask.chi.v[nodes[1]], mask.chi.v[nodes[2]]});
      if (support >= 0.5 && phi.gradient(t).det() <= 0.0)
        throw invalid_input(
            "push_forward_mask: deformation folds an element on the shape");
    }
  }

  ShapeMask out(mesh);
  out.source = mask.source;
  const int m = mesh.nodes_per_side();
  constexpr int kSub = 4;
  for (int iy = 0; iy < m; ++iy) {
    for (int ix = 0; ix < m; ++ix) {
      const Vec2 center = mesh.vertex_position(mesh.vertex_index(ix, iy));
      int inside = 0;
      for (int sy = 0; sy < kSub; ++sy) {
        for (int sx = 0; sx < kSub; ++sx) {
          Vec2 s = center + Vec2(((sx + 0.5) / kSub - 0.5) * mesh.h,
                                 ((sy + 0.5) / kSub - 0.5) * mesh.h);
          s = clamp_to_domain(s);
          const auto hit = locator.locate(s);
          if (!hit) continue;
          const auto nodes = mesh.triangle_nodes(hit->tri);
          const double chi = hit->bary[0] * mask.chi.v[nodes[0]] +
                             hit->bary[1] * mask.chi.v[nodes[1]] +
                             hit->bary[2] * mask.chi.v[nodes[2]];
          if (chi >= 0.5) ++inside;
        }
      }
      out.chi.v[mesh.vertex_index(ix, iy)] =
          static_cast<double>(inside) / (kSub * kSub);
    }
  }
  return out;
}

ShapeMask binarize(const ShapeMask& mask, double threshold) {
  ShapeMask out = mask;
  for (double& v : out.chi.v) v = v >= threshold ? 1.0 : 0.0;
  return out;
}

double symmetric_difference_area(const ShapeMask& a, const ShapeMask& b) {
  if (a.mesh().level != b.mesh().level)
    throw invalid_input("symmetric_difference_area: level mismatch");
  const Mesh& mesh = a.mesh();
  const double cell = mesh.h * mesh.h;
  double area = 0.0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const bool ia = a.chi.v[v] >= 0.5;
    const bool ib = b.chi.v[v] >= 0.5;
    if (ia != ib) area += cell;
  }
  return area;
}

Deformation invert_deformation(const Deformation& phi) {
  const Mesh& mesh = phi.mesh();
  const DeformedLocator locator(phi);
  Deformation out(mesh);

  std::vector<int> missing;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 x = mesh.vertex_position(v);
    const auto p = locator.preimage(x);
    if (p) {
      out.u.set_node(v, *p - x);
    } else {
      missing.push_back(v);
    }
  }
  if (!missing.empty()) {
    // extend phi^{-1} - id beyond phi(D) from the forward nodal samples
    std::vector<Vec2> pts(mesh.vertex_count());
    std::vector<Vec2> vals(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      const Vec2 x = mesh.vertex_position(v);
      const Vec2 y = phi.apply_node(v);
      pts[v] = y;
      vals[v] = x - y;
    }
    const ScatteredField inv(std::move(pts), std::move(vals));
    for (int v : missing)
      out.u.set_node(v, inv.eval(mesh.vertex_position(v)));
  }
  return out;
}

Deformation compose_deformations(const Deformation& outer,
                                 const Deformation& inner) {
  const Mesh& mesh = inner.mesh();
  Deformation out(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 x = mesh.vertex_position(v);
    const Vec2 mid = clamp_to_domain(inner.apply_node(v));
    out.u.set_node(v, outer.apply(mid) - x);
  }
  return out;
}

}  // namespace shapeflow
