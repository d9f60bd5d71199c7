#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "shapeflow/image_io.hpp"
#include "shapeflow/quadrature.hpp"
#include "shapeflow/scattered.hpp"
#include "shapeflow/smooth.hpp"
#include "shapeflow/vfld_io.hpp"
#include "shapeflow/warp.hpp"
#include "support.hpp"

using namespace shapeflow;
using namespace sftest;

namespace fs = std::filesystem;

TEST_CASE("mesh counting invariants") {
  const Mesh m1 = make_mesh(1);
  CHECK(m1.vertex_count() == 9);
  CHECK(m1.triangle_count() == 8);
  const Mesh m6 = make_mesh(6);
  CHECK(m6.vertex_count() == 65 * 65);
  CHECK(m6.triangle_count() == 8192);
  const Mesh m8 = make_mesh(8);
  CHECK(m8.vertex_count() == 257 * 257);
  CHECK_THROWS_AS(make_mesh(0), invalid_input);
  CHECK_THROWS_AS(make_mesh(13), invalid_input);
}

TEST_CASE("all triangles positively oriented") {
  const Mesh m = make_mesh(3);
  for (int t = 0; t < m.triangle_count(); ++t) {
    const auto n = m.triangle_nodes(t);
    const Vec2 p0 = m.vertex_position(n[0]);
    const Vec2 p1 = m.vertex_position(n[1]);
    const Vec2 p2 = m.vertex_position(n[2]);
    CHECK((p1 - p0).cross(p2 - p0) > 0.0);
  }
}

TEST_CASE("eval reproduces affine functions exactly") {
  const Mesh mesh = make_mesh(4);
  ScalarField f(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 x = mesh.vertex_position(v);
    f.v[v] = 0.3 * x.x - 1.7 * x.y + 0.25;
  }
  auto g = rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec2 x{uniform(g, 0.0, 1.0), uniform(g, 0.0, 1.0)};
    CHECK(f.eval(x) ==
          doctest::Approx(0.3 * x.x - 1.7 * x.y + 0.25).epsilon(1e-12));
  }
  // vertex and edge-midpoint identities
  CHECK(f.eval(mesh.vertex_position(17)) == doctest::Approx(f.v[17]));
  const Vec2 a = mesh.vertex_position(mesh.vertex_index(2, 3));
  const Vec2 b = mesh.vertex_position(mesh.vertex_index(3, 3));
  CHECK(f.eval((a + b) * 0.5) ==
        doctest::Approx(0.5 * (f.v[mesh.vertex_index(2, 3)] +
                               f.v[mesh.vertex_index(3, 3)])));
  CHECK_THROWS_AS(f.eval(Vec2{1.5, 0.5}), invalid_input);
}

TEST_CASE("element gradient of interpolated linear maps") {
  const Mesh mesh = make_mesh(3);
  const Matrix2 a(0.6, -0.2, 0.9, 1.4);
  VectorField2 f(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    f.set_node(v, a * mesh.vertex_position(v));
  for (int t = 0; t < mesh.triangle_count(); ++t)
    CHECK((f.element_gradient(t) - a).max_abs() <= 1e-12);

  // identity map has identity gradient
  Deformation id(mesh);
  for (int t = 0; t < mesh.triangle_count(); ++t)
    CHECK((id.gradient(t) - Matrix2::identity()).max_abs() <= 1e-15);
}

TEST_CASE("element gradient matches finite differences of eval") {
  const Mesh mesh = make_mesh(3);
  auto g = rng(5);
  VectorField2 f(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    f.set_node(v, Vec2{uniform(g, -1, 1), uniform(g, -1, 1)});
  // probe a strictly interior point of some triangle
  const Vec2 x{0.3 + 0.01, 0.55 + 0.03};
  const int t = mesh.locate(x).tri;
  const Matrix2 grad = f.element_gradient(t);
  const double step = 1e-7;
  const Vec2 dx = (f.eval(x + Vec2{step, 0}) - f.eval(x - Vec2{step, 0})) *
                  (0.5 / step);
  const Vec2 dy = (f.eval(x + Vec2{0, step}) - f.eval(x - Vec2{0, step})) *
                  (0.5 / step);
  CHECK(grad.a00 == doctest::Approx(dx.x).epsilon(1e-6));
  CHECK(grad.a10 == doctest::Approx(dx.y).epsilon(1e-6));
  CHECK(grad.a01 == doctest::Approx(dy.x).epsilon(1e-6));
  CHECK(grad.a11 == doctest::Approx(dy.y).epsilon(1e-6));
}

TEST_CASE("quadrature weights sum to the triangle area and include corners") {
  const Mesh mesh = make_mesh(2);
  for (int t : {0, 3, 7}) {
    const auto qs = quadrature_points(mesh, t);
    double sum = 0.0;
    for (const auto& q : qs) sum += q.w;
    CHECK(sum == doctest::Approx(mesh.triangle_area()).epsilon(1e-14));
    const auto nodes = mesh.triangle_nodes(t);
    for (int i = 0; i < 3; ++i) {
      const Vec2 p = mesh.vertex_position(nodes[i]);
      bool found = false;
      for (const auto& q : qs)
        found = found || ((q.x - p).norm() <= 1e-15);
      CHECK(found);
    }
  }
}

TEST_CASE("quadrature integrates cubics exactly") {
  const Mesh mesh = make_mesh(1);
  // integrate monomials over the whole unit square via the rule
  auto integrate = [&](auto fn) {
    double acc = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t)
      for (const auto& q : quadrature_points(mesh, t)) acc += q.w * fn(q.x);
    return acc;
  };
  CHECK(integrate([](Vec2) { return 1.0; }) == doctest::Approx(1.0));
  CHECK(integrate([](Vec2 x) { return x.x; }) == doctest::Approx(0.5));
  CHECK(integrate([](Vec2 x) { return x.x * x.y; }) == doctest::Approx(0.25));
  CHECK(integrate([](Vec2 x) { return x.x * x.x; }) ==
        doctest::Approx(1.0 / 3.0));
  CHECK(integrate([](Vec2 x) { return x.x * x.x * x.x; }) ==
        doctest::Approx(0.25).epsilon(1e-13));
  CHECK(integrate([](Vec2 x) { return x.x * x.x * x.y; }) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("pullback evaluation clamps to the domain") {
  const Mesh mesh = make_mesh(4);
  ScalarField coord_x(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    coord_x.v[v] = mesh.vertex_position(v).x;

  Deformation id(mesh);
  CHECK(pullback_eval(coord_x, id, Vec2{0.37, 0.61}) ==
        doctest::Approx(0.37).epsilon(1e-12));

  Deformation shift(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    shift.u.set_node(v, Vec2{0.25, 0.0});
  // interior translation
  CHECK(pullback_eval(coord_x, shift, Vec2{0.5, 0.5}) ==
        doctest::Approx(0.75).epsilon(1e-12));
  // image outside D clamps to the boundary
  Deformation blowout(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    blowout.u.set_node(v, Vec2{1.2, 0.0} - mesh.vertex_position(v) +
                              Vec2{0.0, mesh.vertex_position(v).y});
  CHECK(pullback_eval(coord_x, blowout, Vec2{0.4, 0.5}) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gaussian smoothing preserves constants and mass") {
  const Mesh mesh = make_mesh(5);
  ShapeMask ones(mesh, 1.0);
  const ScalarField s = gaussian_smooth(ones, 2.0 * mesh.h);
  for (double v : s.v) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  const ShapeMask disk = disk_mask(5, {0.5, 0.5}, 0.23);
  const ScalarField sd = gaussian_smooth(disk, 1.7 * mesh.h);
  double mass_in = 0.0, mass_out = 0.0;
  for (double v : disk.chi.v) mass_in += v;
  for (double v : sd.v) mass_out += v;
  CHECK(mass_out == doctest::Approx(mass_in).epsilon(1e-10));
  for (double v : sd.v) {
    CHECK(v >= -1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }
}

TEST_CASE("gaussian smoothing at vanishing width is the identity") {
  const Mesh mesh = make_mesh(4);
  const ShapeMask disk = disk_mask(4, {0.5, 0.5}, 0.3);
  const ScalarField s = gaussian_smooth(disk, 1e-4);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    CHECK(s.v[v] == doctest::Approx(disk.chi.v[v]).epsilon(1e-9));
}

TEST_CASE("smoothed half plane crosses one half at the interface") {
  const int level = 6;
  const Mesh mesh = make_mesh(level);
  ShapeMask half(mesh);
  const int i0 = 32;  // nodes with ix >= i0 are set
  for (int iy = 0; iy <= mesh.n; ++iy)
    for (int ix = 0; ix <= mesh.n; ++ix)
      half.chi.v[mesh.vertex_index(ix, iy)] = ix >= i0 ? 1.0 : 0.0;
  const ScalarField s = gaussian_smooth(half, 2.0 * mesh.h);
  // the jump sits between nodes i0-1 and i0; the half-sample midpoint is the
  // analytic interface of the error-function profile
  const double x_mid = (i0 - 0.5) * mesh.h;
  CHECK(s.eval(Vec2{x_mid, 0.5}) == doctest::Approx(0.5).epsilon(1e-2));
  // and the analytic erf profile matches nearby
  const double sigma = 2.0 * mesh.h;
  for (int offset : {-3, -1, 1, 3}) {
    const double x = x_mid + offset * mesh.h;
    const double expected = 0.5 * std::erfc(-(x - x_mid) / (std::sqrt(2.0) * sigma));
    CHECK(s.eval(Vec2{x, 0.5}) == doctest::Approx(expected).epsilon(2e-2));
  }
}

TEST_CASE("prolongation commutes with evaluation") {
  const Mesh mesh = make_mesh(3);
  auto g = rng(9);
  VectorField2 f(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    f.set_node(v, Vec2{uniform(g, -1, 1), uniform(g, -1, 1)});
  const VectorField2 fine = prolongate(f);
  for (int i = 0; i < 100; ++i) {
    const Vec2 x{uniform(g, 0.0, 1.0), uniform(g, 0.0, 1.0)};
    const Vec2 a = f.eval(x);
    const Vec2 b = fine.eval(x);
    CHECK((a - b).norm() <= 1e-12);
  }
}

TEST_CASE("prolongation maps identity to identity and keeps masks in range") {
  const Mesh mesh = make_mesh(3);
  Deformation id(mesh);
  const Deformation fine = prolongate(id);
  CHECK(fine.max_displacement() <= 1e-15);

  const ShapeMask disk = disk_mask(3, {0.5, 0.5}, 0.3);
  const ShapeMask pd = prolongate(disk);
  for (double v : pd.chi.v) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("image round trip at matched resolution is lossless") {
  const int level = 4;
  const Mesh mesh = make_mesh(level);
  GrayImage img(mesh.nodes_per_side(), mesh.nodes_per_side());
  // checkerboard at node resolution
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      img.at(r, c) = ((r + c) % 2 == 0) ? 255 : 0;
  const ShapeMask mask = rasterize_mask(img, level);
  for (int iy = 0; iy <= mesh.n; ++iy)
    for (int ix = 0; ix <= mesh.n; ++ix) {
      const double expected = ((mesh.n - iy + ix) % 2 == 0) ? 1.0 : 0.0;
      CHECK(mask.chi.v[mesh.vertex_index(ix, iy)] == expected);
    }
  const GrayImage back = mask_to_image(mask);
  REQUIRE(back.width == img.width);
  REQUIRE(back.height == img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    CHECK(back.pixels[i] == img.pixels[i]);
}

TEST_CASE("rasterize_mask handles full frames and rejects empty ones") {
  GrayImage white(33, 33);
  std::fill(white.pixels.begin(), white.pixels.end(), 255);
  const ShapeMask full = rasterize_mask(white, 5);
  for (double v : full.chi.v) CHECK(v == 1.0);

  GrayImage black(33, 33);
  CHECK_THROWS_AS(rasterize_mask(black, 5), invalid_input);
}

TEST_CASE("pgm and png files round trip") {
  const fs::path dir = fs::temp_directory_path() / "shapeflow_io_test";
  fs::create_directories(dir);
  GrayImage img(17, 13);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      img.at(r, c) = static_cast<std::uint8_t>((r * 31 + c * 7) % 256);

  for (const char* name : {"t.pgm", "t.png"}) {
    const std::string path = (dir / name).string();
    save_image(img, path);
    const GrayImage back = load_image(path);
    REQUIRE(back.width == img.width);
    REQUIRE(back.height == img.height);
    CHECK(back.pixels == img.pixels);
  }
  CHECK_THROWS_AS(load_image((dir / "missing.pgm").string()), io_error);
  fs::remove_all(dir);
}

TEST_CASE("vfld round trip") {
  const fs::path dir = fs::temp_directory_path() / "shapeflow_vfld_test";
  fs::create_directories(dir);
  auto g = rng(77);
  const Mesh mesh = make_mesh(3);

  ScalarField f(mesh);
  for (double& v : f.v) v = uniform(g, -5, 5);
  save_vfld(f, (dir / "s.vfld").string());
  const ScalarField fs2 = load_vfld_scalar((dir / "s.vfld").string());
  CHECK(fs2.mesh.level == 3);
  CHECK(fs2.v == f.v);

  VectorField2 vf(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    vf.set_node(v, Vec2{uniform(g, -2, 2), uniform(g, -2, 2)});
  save_vfld(vf, (dir / "v.vfld").string());
  const VectorField2 vf2 = load_vfld_vector((dir / "v.vfld").string());
  CHECK(vf2.x == vf.x);
  CHECK(vf2.y == vf.y);

  CHECK_THROWS_AS(load_vfld_vector((dir / "s.vfld").string()), io_error);
  fs::remove_all(dir);
}

TEST_CASE("vfld header layout is 16 bytes with magic") {
  const fs::path dir = fs::temp_directory_path() / "shapeflow_vfld_hdr";
  fs::create_directories(dir);
  const Mesh mesh = make_mesh(2);
  ScalarField f(mesh, 1.5);
  const std::string path = (dir / "h.vfld").string();
  save_vfld(f, path);
  std::ifstream in(path, std::ios::binary);
  char header[16];
  in.read(header, 16);
  CHECK(std::string(header, 4) == "VFLD");
  std::uint32_t version, level, comps;
  std::memcpy(&version, header + 4, 4);
  std::memcpy(&level, header + 8, 4);
  std::memcpy(&comps, header + 12, 4);
  CHECK(version == 1);
  CHECK(level == 2);
  CHECK(comps == 1);
  double first;
  in.read(reinterpret_cast<char*>(&first), 8);
  CHECK(first == 1.5);
  fs::remove_all(dir);
}

TEST_CASE("moving least squares reproduces affine fields") {
  auto g = rng(123);
  std::vector<Vec2> pts, vals;
  const Matrix2 a(0.7, -0.3, 0.4, 1.2);
  const Vec2 c{0.05, -0.08};
  for (int i = 0; i < 400; ++i) {
    const Vec2 p{uniform(g, 0, 1), uniform(g, 0, 1)};
    pts.push_back(p);
    vals.push_back(a * p + c);
  }
  const ScatteredField field(pts, vals);
  for (int i = 0; i < 50; ++i) {
    const Vec2 q{uniform(g, 0.05, 0.95), uniform(g, 0.05, 0.95)};
    const Vec2 expected = a * q + c;
    CHECK((field.eval(q) - expected).norm() <= 1e-10);
  }
}

TEST_CASE("deformed locator inverts deformations exactly on the image") {
  const Mesh mesh = make_mesh(4);
  auto g = rng(31);
  const Deformation phi = smooth_random_deformation(mesh, g, 0.02);
  const DeformedLocator loc(phi);
  for (int i = 0; i < 100; ++i) {
    const Vec2 x{uniform(g, 0.1, 0.9), uniform(g, 0.1, 0.9)};
    const Vec2 y = phi.apply(x);
    const auto back = loc.preimage(y);
    REQUIRE(back.has_value());
    CHECK((*back - x).norm() <= 1e-12);
  }
}

TEST_CASE("push_forward_mask translates masks by whole cells exactly") {
  const int level = 5;
  const Mesh mesh = make_mesh(level);
  const ShapeMask disk = disk_mask(level, {0.4, 0.5}, 0.2);
  Deformation shift(mesh);
  const double t = 4 * mesh.h;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    shift.u.set_node(v, Vec2{t, 0.0});
  const ShapeMask moved = push_forward_mask(disk, shift);
  const ShapeMask expected = disk_mask(level, {0.4 + t, 0.5}, 0.2);
  // symmetric difference at most a one-cell band
  CHECK(symmetric_difference_area(moved, expected) <=
        2.0 * M_PI * 0.2 * mesh.h * 1.5 + 4 * mesh.h * mesh.h);
}

TEST_CASE("push_forward_mask errors on folded shapes") {
  const int level = 4;
  const Mesh mesh = make_mesh(level);
  const ShapeMask disk = disk_mask(level, {0.5, 0.5}, 0.3);
  Deformation fold(mesh);
  // collapse one interior node far enough to flip its elements
  const int v = mesh.vertex_index(8, 8);
  fold.u.set_node(v, Vec2{2.5 * mesh.h, 0.0});
  CHECK_THROWS_AS(push_forward_mask(disk, fold), invalid_input);
}

TEST_CASE("identity pushforward preserves binary masks") {
  const int level = 5;
  const ShapeMask disk = disk_mask(level, {0.5, 0.5}, 0.25);
  Deformation id(disk.mesh());
  const ShapeMask same = push_forward_mask(disk, id);
  CHECK(symmetric_difference_area(same, disk) == 0.0);
}
