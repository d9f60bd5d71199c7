#include "shapeflow/scattered.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shapeflow {

ScatteredField::ScatteredField(std::vector<Vec2> points,
                               std::vector<Vec2> values, int neighbor_count)
    : pts_(std::move(points)), vals_(std::move(values)), k_(neighbor_count) {
  if (pts_.size() != vals_.size() || pts_.empty())
    throw invalid_input("ScatteredField: inconsistent or empty samples");
  if (k_ < 3) throw invalid_input("ScatteredField: need at least 3 neighbors");

  lo_ = hi_ = pts_[0];
  for (const Vec2& p : pts_) {
    lo_.x = std::min(lo_.x, p.x);
    lo_.y = std::min(lo_.y, p.y);
    hi_.x = std::max(hi_.x, p.x);
    hi_.y = std::max(hi_.y, p.y);
  }
  // pad so queries slightly outside the hull still land in the grid
  const double pad = 1e-9 + 0.01 * std::max(hi_.x - lo_.x, hi_.y - lo_.y);
  lo_ -= Vec2(pad, pad);
  hi_ += Vec2(pad, pad);

  grid_n_ = std::max(1, static_cast<int>(std::sqrt(pts_.size() / 4.0)));
  buckets_.assign(grid_n_ * grid_n_, {});
  for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
    const int bx = std::clamp(
        static_cast<int>((pts_[i].x - lo_.x) / (hi_.x - lo_.x) * grid_n_), 0,
        grid_n_ - 1);
    const int by = std::clamp(
        static_cast<int>((pts_[i].y - lo_.y) / (hi_.y - lo_.y) * grid_n_), 0,
        grid_n_ - 1);
    buckets_[by * grid_n_ + bx].push_back(i);
  }
}

void ScatteredField::gather_neighbors(Vec2 q, std::vector<int>& out) const {
  const int bx = std::clamp(
      static_cast<int>((q.x - lo_.x) / (hi_.x - lo_.x) * grid_n_), 0,
      grid_n_ - 1);
  const int by = std::clamp(
      static_cast<int>((q.y - lo_.y) / (hi_.y - lo_.y) * grid_n_), 0,
      grid_n_ - 1);
  out.clear();
  for (int ring = 0; ring < grid_n_; ++ring) {
    const int x0 = std::max(0, bx - ring), x1 = std::min(grid_n_ - 1, bx + ring);
    const int y0 = std::max(0, by - ring), y1 = std::min(grid_n_ - 1, by + ring);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        if (ring > 0 && x != x0 && x != x1 && y != y0 && y != y1) continue;
        for (int i : buckets_[y * grid_n_ + x]) out.push_back(i);
      }
    // one extra ring after enough candidates so true neighbors are not missed
    if (static_cast<int>(out.size()) >= 3 * k_ && ring >= 1) break;
    if (x0 == 0 && y0 == 0 && x1 == grid_n_ - 1 && y1 == grid_n_ - 1) break;
  }
}

Vec2 ScatteredField::eval(Vec2 q) const {
  thread_local std::vector<int> candidates;
  gather_neighbors(q, candidates);

  const int k = std::min<int>(k_, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + k,
                    candidates.end(), [&](int a, int b) {
                      const double da = (pts_[a] - q).dot(pts_[a] - q);
                      const double db = (pts_[b] - q).dot(pts_[b] - q);
                      if (da != db) return da < db;
                      return a < b;
                    });

  double max_d2 = 0.0;
  for (int i = 0; i < k; ++i) {
    const Vec2 d = pts_[candidates[i]] - q;
    max_d2 = std::max(max_d2, d.dot(d));
  }
  const double sigma2 = std::max(max_d2, 1e-300);

  // weighted normal equations for the affine model (1, dx, dy) per component
  double m[3][3] = {};
  double rx[3] = {}, ry[3] = {};
  for (int i = 0; i < k; ++i) {
    const int idx = candidates[i];
    const Vec2 d = pts_[idx] - q;
    const double w = std::exp(-(d.dot(d)) / sigma2);
    const double b[3] = {1.0, d.x, d.y};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += w * b[r] * b[c];
      rx[r] += w * b[r] * vals_[idx].x;
      ry[r] += w * b[r] * vals_[idx].y;
    }
  }

  // 3x3 Cholesky; on failure (collinear neighborhood) fall back to the
  // weighted mean, which is the constant-model fit.
  double l[3][3] = {};
  bool ok = true;
  for (int i = 0; i < 3 && ok; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m[i][j];
      for (int p = 0; p < j; ++p) s -= l[i][p] * l[j][p];
      if (i == j) {
        if (s <= 1e-14 * (1.0 + m[0][0])) {
          ok = false;
          break;
        }
        l[i][i] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  if (!ok) return {rx[0] / m[0][0], ry[0] / m[0][0]};

  auto solve = [&](const double* rhs) {
    double z[3], c[3];
    for (int i = 0; i < 3; ++i) {
      double s = rhs[i];
      for (int p = 0; p < i; ++p) s -= l[i][p] * z[p];
      z[i] = s / l[i][i];
    }
    for (int i = 2; i >= 0; --i) {
      double s = z[i];
      for (int p = i + 1; p < 3; ++p) s -= l[p][i] * c[p];
      c[i] = s / l[i][i];
    }
    return c[0];  // model value at the query point
  };
  return {solve(rx), solve(ry)};
}

VectorField2 ScatteredField::resample(const Mesh& mesh) const {
  VectorField2 out(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    out.set_node(v, eval(mesh.vertex_position(v)));
  return out;
}

}  // namespace shapeflow
