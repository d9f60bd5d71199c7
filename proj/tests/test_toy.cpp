#include <doctest.h>

#include <cmath>

#include "shapeflow/schild.hpp"
#include "shapeflow/toy.hpp"
#include "support.hpp"

using namespace shapeflow;

TEST_CASE("plane geodesics are equally spaced and collinear") {
  const auto plane = make_plane();
  const ToyPath path = toy_discrete_geodesic(*plane, {0.1, 0.2}, {0.9, 0.6}, 6);
  const Vec3 a = path.positions.front();
  const Vec3 b = path.positions.back();
  for (int k = 0; k <= 6; ++k) {
    const Vec3 expected = a + (b - a) * (k / 6.0);
    CHECK((path.positions[k] - expected).norm() <= 1e-9);
  }
  const double step = path.steps.front().norm();
  for (const Vec3& s : path.steps) CHECK(s.norm() == doctest::Approx(step));
}

TEST_CASE("constant endpoints give the constant path") {
  const auto sphere = make_unit_sphere_patch();
  const Vec2 a{0.3, 1.2};
  const ToyPath path = toy_discrete_geodesic(*sphere, a, a, 4);
  for (const Vec3& s : path.steps) CHECK(s.norm() <= 1e-12);
}

TEST_CASE("sphere geodesics lie on the great circle with equal chords") {
  const auto sphere = make_unit_sphere_patch();
  const Vec2 pa{0.0, M_PI / 2};
  const Vec2 pb{M_PI / 4, M_PI / 2};  // quarter-pi separation on the equator
  const int K = 8;
  const ToyPath path = toy_discrete_geodesic(*sphere, pa, pb, K);

  const Vec3 a = path.positions.front();
  const Vec3 b = path.positions.back();
  const Vec3 n = a.cross(b);  // great circle plane normal
  for (const Vec3& p : path.positions) {
    CHECK(std::abs(p.norm() - 1.0) <= 1e-12);
    CHECK(std::abs(p.dot(n) / n.norm()) <= 1e-6);
  }
  // equal chords: slerp positions
  const double ang = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
  for (int k = 0; k <= K; ++k) {
    const Vec3 slerp = sphere_exp(a, sphere_log(a, b) * (static_cast<double>(k) / K));
    CHECK((path.positions[k] - slerp).norm() <= 1e-6);
  }
  const double chord = 2.0 * std::sin(ang / (2 * K));
  for (const Vec3& s : path.steps)
    CHECK(s.norm() == doctest::Approx(chord).epsilon(1e-6));
}

TEST_CASE("toy energy converges monotonically to the continuum value") {
  // chords underestimate arcs, so the discrete energy of the chord-spring
  // model increases with K toward the squared geodesic length
  const auto sphere = make_unit_sphere_patch();
  const Vec2 pa{0.0, M_PI / 2};
  const Vec2 pb{M_PI / 4, 1.2};
  const double continuum =
      sphere_log(sphere->at(pa), sphere->at(pb)).norm_sq();
  double last = 0.0;
  for (int K : {2, 4, 8}) {
    const ToyPath path = toy_discrete_geodesic(*sphere, pa, pb, K);
    const double e = K * path.energy();
    const double l = path.length();
    CHECK(e >= l * l * (1.0 - 1e-12));
    CHECK(e >= last * (1.0 - 1e-9));
    CHECK(e <= continuum * (1.0 + 1e-9));
    last = e;
  }
  CHECK(last == doctest::Approx(continuum).epsilon(0.01));
}

TEST_CASE("log and exp convergence on the plane is exact") {
  const auto plane = make_plane();
  const auto rows =
      toy_log_exp_convergence(*plane, {0.2, 0.3}, {0.7, 0.5}, {1, 2, 4, 8});
  for (const auto& r : rows) {
    CHECK(r.log_error <= 1e-10);
    CHECK(r.exp_error <= 1e-10);
  }
}

TEST_CASE("log and exp converge monotonically on the sphere") {
  const auto sphere = make_unit_sphere_patch();
  const Vec2 pa{0.0, M_PI / 2};
  const Vec2 pb{M_PI / 4, M_PI / 2};
  const auto rows = toy_log_exp_convergence(*sphere, pa, pb, {1, 2, 4, 8});
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].log_error < rows[i - 1].log_error);
    CHECK(rows[i].exp_error < rows[i - 1].exp_error);
  }
  CHECK(rows[3].log_error <= rows[0].log_error / 4.0);
  CHECK(rows[3].exp_error <= rows[0].exp_error / 4.0);
}

TEST_CASE("errors vanish uniformly as the separation shrinks") {
  const auto sphere = make_unit_sphere_patch();
  const Vec2 pa{0.0, M_PI / 2};
  double last = 1e300;
  for (double sep : {0.4, 0.2, 0.1}) {
    const auto rows =
        toy_log_exp_convergence(*sphere, pa, {sep, M_PI / 2}, {1, 2, 4});
    double worst = 0.0;
    for (const auto& r : rows)
      worst = std::max({worst, r.log_error, r.exp_error});
    CHECK(worst < last);
    // K=1 dominates with a chord-vs-log error of about sep^2/2
    CHECK(worst <= 0.6 * sep * sep + 1e-9);
    last = worst;
  }
}

TEST_CASE("toy exp2 doubles the step exactly on the plane") {
  const auto plane = make_plane();
  ToyCalculus calc(*plane);
  const Vec2 base{0.3, 0.4};
  const Vec3 v{0.11, -0.07, 0.0};
  const Vec2 q = calc.exp2(base, v);
  CHECK((plane->at(q) - Vec3{0.52, 0.26, 0.0}).norm() <= 1e-9);
}

TEST_CASE("shortcut study: length minimizer jumps, energy minimizer refines") {
  const auto bump = make_bump_surface();
  const Vec2 a{0.35, 0.5};
  const Vec2 b{0.65, 0.5};
  const ShortcutReport report =
      toy_length_energy_shortcut(*bump, a, b, {4, 8, 16});

  CHECK(report.ambient_gap == doctest::Approx(0.3).epsilon(1e-6));
  for (const auto& row : report.rows)
    CHECK(row.length_max_step >= 0.8 * report.ambient_gap);

  const double e4 = report.rows[0].energy_max_step;
  const double e16 = report.rows[2].energy_max_step;
  CHECK(e16 <= 0.5 * e4);
}

TEST_CASE("shortcut study control: both minimizers coincide on the plane") {
  const auto plane = make_plane();
  const Vec2 a{0.35, 0.5};
  const Vec2 b{0.65, 0.5};
  const ShortcutReport report = toy_length_energy_shortcut(*plane, a, b, {4});
  const auto& row = report.rows[0];
  // the energy minimizer is also a length minimizer on flat ground
  CHECK(row.length_value == doctest::Approx(report.ambient_gap).epsilon(1e-6));
  const double e_path_length = std::sqrt(row.energy_value * 4.0);
  CHECK(e_path_length == doctest::Approx(report.ambient_gap).epsilon(0.02));
}

TEST_CASE("holonomy vanishes on the plane and on degenerate triangles") {
  const auto plane = make_plane();
  CHECK(std::abs(toy_transport_holonomy(
            *plane, {Vec2{0.2, 0.2}, Vec2{0.8, 0.3}, Vec2{0.5, 0.8}})) <= 1e-9);

  const auto sphere = make_unit_sphere_patch();
  // collinear points on the equator enclose no area
  CHECK(std::abs(toy_transport_holonomy(
            *sphere, {Vec2{0.0, M_PI / 2}, Vec2{0.3, M_PI / 2},
                      Vec2{0.6, M_PI / 2}})) <= 1e-3);
}

TEST_CASE("spherical holonomy matches the analytic excess") {
  const auto sphere = make_unit_sphere_patch();
  // right triangle on the sphere: vertices on the equator and toward the pole
  const double s = 0.633;  // tuned so the spherical excess is about 0.2
  const std::array<Vec2, 3> tri{Vec2{0.0, M_PI / 2}, Vec2{s, M_PI / 2},
                                Vec2{0.0, M_PI / 2 - s}};
  // analytic excess from the angle sum (Gauss-Bonnet; unit sphere)
  const Vec3 a = sphere->at(tri[0]);
  const Vec3 b = sphere->at(tri[1]);
  const Vec3 c = sphere->at(tri[2]);
  auto angle = [](Vec3 at, Vec3 p, Vec3 q) {
    const Vec3 u = sphere_log(at, p);
    const Vec3 v = sphere_log(at, q);
    return std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
  };
  const double excess =
      angle(a, b, c) + angle(b, c, a) + angle(c, a, b) - M_PI;
  REQUIRE(excess == doctest::Approx(0.2).epsilon(0.05));

  const double rotation = toy_transport_holonomy(*sphere, tri, 8);
  CHECK(std::abs(std::abs(rotation) - excess) <= 0.1 * excess);
}
