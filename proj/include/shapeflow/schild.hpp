#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "shapeflow/logexp.hpp"

namespace shapeflow {

// Schild's ladder: first-order parallel transport by geodesic parallelograms
// whose diagonals meet at midpoints. The recursion is generic over a
// geodesic calculus backend so the same ladder drives both the shape space
// and the analytic toy surfaces used as oracles.
//
// Backend requirements:
//   using Point  = ...;  using Vector = ...;
//   Point exp1(const Point& base, const Vector& v);
//   Point exp2(const Point& base, const Vector& v);       // double step
//   Vector log1(const Point& from, const Point& to);
//   Point midpoint(const Point& a, const Point& b);       // order-2 geodesic middle
//
// One ladder rung from o_prev to o_next, carrying zeta at o_prev:
//   p  = exp1(o_prev, zeta)            parallelogram top-left
//   x  = midpoint(p, o_next)           diagonals meet here
//   p' = exp2(o_prev, log1(o_prev, x)) top-right
//   transported = log1(o_next, p')
template <class Calc>
struct SchildStep {
  typename Calc::Point parallel_point;  // p'
  typename Calc::Point cross_point;     // x
  typename Calc::Vector transported;
};

template <class Calc>
SchildStep<Calc> schild_step(Calc& calc, const typename Calc::Point& o_prev,
                             const typename Calc::Point& o_next,
                             const typename Calc::Vector& zeta) {
  SchildStep<Calc> out;
  const auto p = calc.exp1(o_prev, zeta);
  out.cross_point = calc.midpoint(p, o_next);
  out.parallel_point = calc.exp2(o_prev, calc.log1(o_prev, out.cross_point));
  out.transported = calc.log1(o_next, out.parallel_point);
  return out;
}

// Transport along a discrete path. The final log1 of each rung is the
// inverse of the next rung's exp1, so the parallel point is carried forward
// and the displacement is extracted only at the last shape.
template <class Calc>
typename Calc::Vector schild_transport(
    Calc& calc, const std::vector<typename Calc::Point>& path,
    const typename Calc::Vector& zeta,
    std::vector<typename Calc::Point>* parallel_points = nullptr,
    std::vector<typename Calc::Point>* cross_points = nullptr) {
  if (path.size() < 2)
    throw invalid_input("schild_transport: path needs at least two points");
  auto p = calc.exp1(path[0], zeta);
  if (parallel_points) parallel_points->push_back(p);
  for (std::size_t k = 1; k < path.size(); ++k) {
    const auto x = calc.midpoint(p, path[k]);
    p = calc.exp2(path[k - 1], calc.log1(path[k - 1], x));
    if (cross_points) cross_points->push_back(x);
    if (parallel_points) parallel_points->push_back(p);
  }
  return calc.log1(path.back(), p);
}

// Time discrete covariant derivative of a variation field eta in direction
// xi: (1/tau) (P_{o, o_tau} eta(o_tau) - eta(o)) with o_tau = exp1(tau xi).
template <class Calc>
typename Calc::Vector discrete_connection_generic(
    Calc& calc, const typename Calc::Point& o,
    const std::function<typename Calc::Vector(const typename Calc::Point&)>& eta,
    const typename Calc::Vector& xi, double tau) {
  const auto o_tau = calc.exp1(o, calc.scale(xi, tau));
  const std::vector<typename Calc::Point> edge{o_tau, o};
  const auto transported = schild_transport(calc, edge, eta(o_tau));
  return calc.scale(calc.subtract(transported, eta(o)), 1.0 / tau);
}

// Shape-space backend over the discrete geodesic solvers. Each ladder stage
// obeys the exp2 smallness guard; when a stage refuses, the offending edge is
// subdivided at the geodesic midpoint and transported in two hops.
class ShapeCalculus {
public:
  using Point = ShapeMask;
  using Vector = VectorField2;

  ShapeCalculus(const SolverConfig& cfg, const MaterialParams& p)
      : cfg_(cfg), p_(p) {}

  Point exp1(const Point& base, const Vector& v) const;
  Point exp2(const Point& base, const Vector& v) const;
  Vector log1(const Point& from, const Point& to) const;
  Point midpoint(const Point& a, const Point& b) const;
  Vector scale(const Vector& v, double s) const;
  Vector subtract(const Vector& a, const Vector& b) const;

private:
  SolverConfig cfg_;
  MaterialParams p_;

  SolverConfig solver_config(int level, int K) const;
};

struct TransportJob {
  std::vector<ShapeMask> path;  // O_0..O_K
  ShapeVariation variation;     // at O_0
  // per-step parallelogram diagnostics, filled by transport_path
  std::vector<ShapeMask> parallel_points;
  std::vector<ShapeMask> cross_points;

  void validate() const;
};

// One Schild rung in shape space with automatic edge subdivision.
ShapeVariation transport_step(const ShapeMask& o_prev, const ShapeMask& o_next,
                              const ShapeVariation& zeta,
                              const SolverConfig& cfg, const MaterialParams& p);

// Transport along the whole path (diagnostics recorded in the job).
ShapeVariation transport_path(TransportJob& job, const SolverConfig& cfg,
                              const MaterialParams& p);

// Time discrete connection on shape space.
ShapeVariation discrete_connection(
    const ShapeVariation& xi,
    const std::function<ShapeVariation(const ShapeMask&)>& eta, double tau,
    const SolverConfig& cfg, const MaterialParams& p);

}  // namespace shapeflow
