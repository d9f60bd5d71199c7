#include <doctest.h>

#include <cmath>

#include "shapeflow/assembly.hpp"
#include "shapeflow/geodesic.hpp"
#include "support.hpp"

using namespace shapeflow;
using namespace sftest;

namespace {

Deformation translation(const Mesh& mesh, Vec2 t) {
  Deformation d(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v) d.u.set_node(v, t);
  return d;
}

Deformation linear_map(const Mesh& mesh, const Matrix2& a) {
  Deformation d(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 x = mesh.vertex_position(v);
    d.u.set_node(v, a * x - x);
  }
  return d;
}

}  // namespace

TEST_CASE("pair energy vanishes on identities and translations") {
  const int level = 4;
  const Mesh mesh = make_mesh(level);
  const ShapeMask disk = disk_mask(level, {0.5, 0.5}, 0.3);
  const Deformation id(mesh);
  MaterialParams p;

  CHECK(pair_energy(disk, id, id, id, p) == doctest::Approx(0.0));

  const Deformation shift = translation(mesh, {0.07, -0.03});
  CHECK(pair_energy(disk, shift, id, id, p) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("pair energy of a uniform scaling is area times the density") {
  const int level = 4;
  const Mesh mesh = make_mesh(level);
  const ShapeMask full(mesh, 1.0);
  const Deformation id(mesh);
  MaterialParams p;
  p.lambda = 1.0;
  p.mu = 1.0;
  const double s = 1.15;
  const Deformation scale = linear_map(mesh, Matrix2::diag(s, s));
  const double expected = energy_density(Matrix2::diag(s, s), p);  // area 1
  CHECK(pair_energy(full, id, id, scale, p) ==
        doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("pair energy is infinite for singular prev gradients") {
  const int level = 3;
  const Mesh mesh = make_mesh(level);
  const ShapeMask full(mesh, 1.0);
  const Deformation id(mesh);
  MaterialParams p;
  const Deformation collapse = linear_map(mesh, Matrix2::diag(0.0, 1.0));
  CHECK(std::isinf(pair_energy(full, id, collapse, id, p)));
}

TEST_CASE("mismatch penalty examples") {
  const int level = 5;
  const Mesh mesh = make_mesh(level);
  MaterialParams p;
  p.delta2 = mesh.h;
  const ShapeMask disk = disk_mask(level, {0.5, 0.5}, 0.2);
  const Deformation id(mesh);

  CHECK(mismatch_penalty(disk, disk, id, p) == doctest::Approx(0.0));

  // empty-vs-empty: all-zero masks have zero penalty
  ShapeMask empty(mesh);
  CHECK(mismatch_penalty(empty, empty, id, p) == doctest::Approx(0.0));

  // translated target: positive, increasing with offset
  double last = 0.0;
  for (double t : {0.02, 0.04, 0.08}) {
    const ShapeMask target = disk_mask(level, {0.5 + t, 0.5}, 0.2);
    const double pen = mismatch_penalty(disk, target, id, p);
    CHECK(pen > last);
    last = pen;
  }
}

TEST_CASE("regularizer examples") {
  const int level = 4;
  const Mesh mesh = make_mesh(level);
  MaterialParams p;
  const Deformation id(mesh);
  CHECK(deformation_regularizer(id, p) == doctest::Approx(0.0));

  // nodal interpolant of a rigid rotation about the domain center
  const Matrix2 r = Matrix2::rotation(0.4);
  Deformation rot(mesh);
  const Vec2 c{0.5, 0.5};
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 x = mesh.vertex_position(v);
    rot.u.set_node(v, c + r * (x - c) - x);
  }
  CHECK(std::abs(deformation_regularizer(rot, p)) <= 1e-8);

  // folding one cell makes it infinite
  Deformation fold(mesh);
  fold.u.set_node(mesh.vertex_index(8, 8), Vec2{2.5 * mesh.h, 0.0});
  CHECK(std::isinf(deformation_regularizer(fold, p)));
}

TEST_CASE("total energy of the constant path is zero and non-negative") {
  const int level = 4;
  const ShapeMask disk = disk_mask(level, {0.5, 0.5}, 0.25);
  MaterialParams p;
  p.delta2 = make_mesh(level).h;
  const DiscretePath path = DiscretePath::identity(disk, 3);
  const EnergyBreakdown b = total_energy(path, disk, disk, p);
  CHECK(b.total == doctest::Approx(0.0));
  CHECK(b.penalty0 == doctest::Approx(0.0));
  CHECK(b.penaltyK == doctest::Approx(0.0));
  for (double w : b.pair) CHECK(w >= 0.0);
  for (double w : b.reg) CHECK(w >= 0.0);
  CHECK(b.total ==
        doctest::Approx(path.K * b.pair_sum() + b.reg_sum() + b.penalty0 +
                        b.penaltyK));
}

TEST_CASE("objective energy agrees with the reference total energy") {
  const int level = 3;
  const Mesh mesh = make_mesh(level);
  MaterialParams p;
  p.delta2 = mesh.h;
  const ShapeMask src = disk_mask(level, {0.45, 0.5}, 0.25);
  const ShapeMask tgt = disk_mask(level, {0.55, 0.5}, 0.25);

  DiscretePath path = DiscretePath::identity(src, 2);
  auto g = rng(91);
  for (auto& d : path.defs) d = smooth_random_deformation(mesh, g, 0.015);
  for (auto& m : path.matchings) m = smooth_random_deformation(mesh, g, 0.01);

  const EnergyBreakdown ref = total_energy(path, src, tgt, p);
  PathObjective obj(path, src, tgt, p);
  EnergyBreakdown fast;
  const double total = obj.energy(obj.pack(path.defs), &fast);
  CHECK(total == doctest::Approx(ref.total).epsilon(1e-12));
  for (int k = 0; k < path.K; ++k)
    CHECK(fast.pair[k] == doctest::Approx(ref.pair[k]).epsilon(1e-12));
  CHECK(fast.penalty0 == doctest::Approx(ref.penalty0).epsilon(1e-12));
  CHECK(fast.penaltyK == doctest::Approx(ref.penaltyK).epsilon(1e-12));
}

TEST_CASE("gradient matches finite differences of the total energy") {
  const int level = 3;
  const Mesh mesh = make_mesh(level);
  MaterialParams p;
  p.delta2 = mesh.h;
  const ShapeMask src = disk_mask(level, {0.45, 0.5}, 0.25);
  const ShapeMask tgt = disk_mask(level, {0.55, 0.5}, 0.25);

  DiscretePath path = DiscretePath::identity(src, 2);
  auto g = rng(17);
  for (auto& d : path.defs) d = smooth_random_deformation(mesh, g, 0.012);
  for (auto& m : path.matchings) m = smooth_random_deformation(mesh, g, 0.008);

  PathObjective obj(path, src, tgt, p);
  const Eigen::VectorXd z = obj.pack(path.defs);
  const Eigen::VectorXd grad = obj.gradient(z);

  const double step = 1e-6;
  double max_rel = 0.0;
  const double scale = grad.lpNorm<Eigen::Infinity>();
  auto probe = rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int i = static_cast<int>(uniform(probe, 0.0, obj.dof_count() - 0.001));
    Eigen::VectorXd zp = z, zm = z;
    zp[i] += step;
    zm[i] -= step;
    const double fd = (obj.energy(zp) - obj.energy(zm)) / (2.0 * step);
    max_rel = std::max(max_rel, std::abs(fd - grad[i]) / (1.0 + scale));
  }
  CHECK(max_rel <= 1e-4);
}

TEST_CASE("hessian matches finite differences of the gradient") {
  const int level = 2;
  const Mesh mesh = make_mesh(level);
  MaterialParams p;
  p.delta2 = mesh.h;
  const ShapeMask src = disk_mask(level, {0.45, 0.5}, 0.3);
  const ShapeMask tgt = disk_mask(level, {0.55, 0.5}, 0.3);

  DiscretePath path = DiscretePath::identity(src, 2);
  auto g = rng(29);
  for (auto& d : path.defs) d = smooth_random_deformation(mesh, g, 0.012);
  for (auto& m : path.matchings) m = smooth_random_deformation(mesh, g, 0.01);

  PathObjective obj(path, src, tgt, p);
  const Eigen::VectorXd z = obj.pack(path.defs);
  const Eigen::SparseMatrix<double> h = obj.hessian(z);

  const double step = 1e-6;
  auto probe = rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const int i = static_cast<int>(uniform(probe, 0.0, obj.dof_count() - 0.001));
    Eigen::VectorXd zp = z, zm = z;
    zp[i] += step;
    zm[i] -= step;
    const Eigen::VectorXd fd_col =
        (obj.gradient(zp) - obj.gradient(zm)) / (2.0 * step);
    const Eigen::VectorXd h_col = h.col(i);
    const double scale = 1.0 + h_col.lpNorm<Eigen::Infinity>();
    CHECK((fd_col - h_col).lpNorm<Eigen::Infinity>() / scale <= 2e-4);
  }
}

TEST_CASE("hessian is symmetric") {
  const int level = 3;
  const Mesh mesh = make_mesh(level);
  MaterialParams p;
  p.delta2 = mesh.h;
  const ShapeMask src = disk_mask(level, {0.5, 0.5}, 0.3);

  DiscretePath path = DiscretePath::identity(src, 2);
  auto g = rng(41);
  for (auto& d : path.defs) d = smooth_random_deformation(mesh, g, 0.015);
  for (auto& m : path.matchings) m = smooth_random_deformation(mesh, g, 0.01);

  PathObjective obj(path, src, src, p);
  const Eigen::VectorXd z = obj.pack(path.defs);
  const Eigen::SparseMatrix<double> h = obj.hessian(z);

  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(obj.dof_count());
    Eigen::VectorXd y = Eigen::VectorXd::Zero(obj.dof_count());
    auto gg = rng(100 + trial);
    for (int i = 0; i < obj.dof_count(); ++i) {
      x[i] = uniform(gg, -1, 1);
      y[i] = uniform(gg, -1, 1);
    }
    const double hxy = y.dot(h * x);
    const double hyx = x.dot(h * y);
    CHECK(std::abs(hxy - hyx) <= 1e-8 * (1.0 + std::abs(hxy)));
  }
}

TEST_CASE("hessian couples only adjacent deformations") {
  const int level = 3;
  const Mesh mesh = make_mesh(level);
  MaterialParams p;
  p.delta2 = mesh.h;
  const ShapeMask src = disk_mask(level, {0.5, 0.5}, 0.3);

  DiscretePath path = DiscretePath::identity(src, 4);
  auto g = rng(43);
  for (auto& d : path.defs) d = smooth_random_deformation(mesh, g, 0.01);

  PathObjective obj(path, src, src, p);
  obj.hessian(obj.pack(path.defs));
  const Eigen::SparseMatrix<double>& h = obj.hessian_matrix();
  const int bd = obj.block_dim();
  for (int col = 0; col < h.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(h, col); it; ++it) {
      const int kr = static_cast<int>(it.row()) / bd;
      const int kc = static_cast<int>(it.col()) / bd;
      REQUIRE(std::abs(kr - kc) <= 1);  // structural zero beyond adjacency
    }
}

TEST_CASE("discrete length and energy arithmetic") {
  // W values (1,1) at K=2: L=2, E=4; W values (1,4): L=3, E=10 >= L^2
  std::vector<double> w1{1.0, 1.0};
  double l = 0.0, e = 0.0;
  for (double w : w1) {
    l += std::sqrt(w);
    e += w;
  }
  e *= 2;
  CHECK(l == doctest::Approx(2.0));
  CHECK(e == doctest::Approx(4.0));
  CHECK(e == doctest::Approx(l * l));

  std::vector<double> w2{1.0, 4.0};
  l = 0.0;
  e = 0.0;
  for (double w : w2) {
    l += std::sqrt(w);
    e += w;
  }
  e *= 2;
  CHECK(l == doctest::Approx(3.0));
  CHECK(e == doctest::Approx(10.0));
  CHECK(e >= l * l);
}

TEST_CASE("self path has zero discrete length and energy") {
  const int level = 4;
  const ShapeMask disk = disk_mask(level, {0.5, 0.5}, 0.25);
  MaterialParams p;
  const DiscretePath path = DiscretePath::identity(disk, 2);
  CHECK(discrete_length(path, p) == doctest::Approx(0.0));
  CHECK(discrete_energy(path, p) == doctest::Approx(0.0));
}
