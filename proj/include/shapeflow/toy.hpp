#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "shapeflow/errors.hpp"
#include "shapeflow/matrix2.hpp"

namespace shapeflow {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm_sq() const { return dot(*this); }
  double norm() const { return std::sqrt(norm_sq()); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Parameterized smooth surface patch in 3-space. Points are parameter pairs;
// the spring-chain model treats displacements as ambient chord vectors with
// energy |zeta|^2, giving an analytically tractable stand-in for the shape
// space machinery.
class EmbeddedSurface {
public:
  virtual ~EmbeddedSurface() = default;

  virtual Vec3 at(Vec2 uv) const = 0;
  virtual void jacobian(Vec2 uv, Vec3& du, Vec3& dv) const = 0;
  // second parameter derivatives (uu, uv, vv)
  virtual void second(Vec2 uv, Vec3& duu, Vec3& duv, Vec3& dvv) const = 0;
  virtual Vec2 param_lo() const = 0;
  virtual Vec2 param_hi() const = 0;

  Vec3 normal(Vec2 uv) const {
    Vec3 du, dv;
    jacobian(uv, du, dv);
    return du.cross(dv);
  }
  // nearest parameter point to an ambient target, Gauss-Newton from a seed
  Vec2 project(Vec3 target, Vec2 seed) const;
};

std::unique_ptr<EmbeddedSurface> make_plane();
std::unique_ptr<EmbeddedSurface> make_unit_sphere_patch();
// Gaussian bump z = height exp(-|x-c|^2 / width^2) on the unit square.
std::unique_ptr<EmbeddedSurface> make_bump_surface(double height = 1.5,
                                                   double width = 0.1,
                                                   Vec2 center = {0.5, 0.5});

struct ToyPath {
  std::vector<Vec2> params;            // K+1 on-surface points
  std::vector<Vec3> positions;         // embedded positions
  std::vector<Vec3> steps;             // ambient chord displacements, K of them

  double energy() const;               // sum |zeta_k|^2
  double length() const;               // sum |zeta_k|
  double max_step() const;
};

// Minimizes the chord-spring energy sum |P(x_k) - P(x_{k-1})|^2 over the
// interior points by damped Newton in parameter space (iterates stay
// on-surface by construction). Endpoints fixed.
ToyPath toy_discrete_geodesic(const EmbeddedSurface& surface, Vec2 a, Vec2 b,
                              int K);

// Analytic sphere helpers (oracles).
Vec3 sphere_log(Vec3 a, Vec3 b);         // Riemannian log as an ambient tangent
Vec3 sphere_exp(Vec3 a, Vec3 tangent);   // geodesic endpoint

// Toy geodesic calculus backed by the chord-spring model: the same Schild
// ladder recursion as shape space, with analytic solves. exp1 projects
// base + zeta back onto the surface; exp2 finds the point whose 2-geodesic
// midpoint is exp1's result.
class ToyCalculus {
public:
  using Point = Vec2;
  using Vector = Vec3;

  explicit ToyCalculus(const EmbeddedSurface& surface) : surface_(surface) {}

  Point exp1(const Point& base, const Vector& v) const;
  Point exp2(const Point& base, const Vector& v) const;
  Vector log1(const Point& from, const Point& to) const;
  Point midpoint(const Point& a, const Point& b) const;
  Vector scale(const Vector& v, double s) const { return v * s; }
  Vector subtract(const Vector& a, const Vector& b) const { return a - b; }

private:
  const EmbeddedSurface& surface_;
};

struct ConvergenceRow {
  int K = 0;
  double log_error = 0.0;
  double exp_error = 0.0;
};

// Log/exp consistency against the analytic sphere (or trivially the plane):
// log error  ||K Log^K_a(b) - log_a(b)||,
// exp error  ||Exp^k_a(zeta/k) - exp_a(zeta)|| with zeta = log_a(b).
std::vector<ConvergenceRow> toy_log_exp_convergence(
    const EmbeddedSurface& surface, Vec2 a, Vec2 b, const std::vector<int>& Ks);

void write_convergence_csv(const std::vector<ConvergenceRow>& rows,
                           const std::string& path);

// Length-vs-energy shortcut study on the bump geometry: exhaustive dynamic
// program over a parameter grid for both objectives; the length minimizer
// jumps the protrusion through ambient space while the energy minimizer's
// steps shrink with K.
struct ShortcutRow {
  int K = 0;
  double energy_max_step = 0.0;
  double length_max_step = 0.0;
  double energy_value = 0.0;
  double length_value = 0.0;
};

struct ShortcutReport {
  double ambient_gap = 0.0;  // |P(b) - P(a)|
  std::vector<ShortcutRow> rows;
};

ShortcutReport toy_length_energy_shortcut(const EmbeddedSurface& surface,
                                          Vec2 a, Vec2 b,
                                          const std::vector<int>& Ks,
                                          int grid_n = 61);

// Net tangent rotation after transporting a vector around the (closed)
// triangle via the discrete ladder, each edge sampled as a discrete geodesic
// with the given number of rungs.
double toy_transport_holonomy(const EmbeddedSurface& surface,
                              const std::array<Vec2, 3>& triangle,
                              int rungs_per_edge = 8);

}  // namespace shapeflow
