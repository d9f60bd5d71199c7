#include "shapeflow/schild.hpp"

#include <cmath>

#include "shapeflow/warp.hpp"

namespace shapeflow {

SolverConfig ShapeCalculus::solver_config(int level, int K) const {
  SolverConfig out = cfg_;
  out.schedule = default_schedule(std::max(3, level - 2), level, K);
  return out;
}

ShapeCalculus::Point ShapeCalculus::exp1(const Point& base,
                                         const Vector& v) const {
  return shape_exp1(ShapeVariation{base, v});
}

ShapeCalculus::Point ShapeCalculus::exp2(const Point& base,
                                         const Vector& v) const {
  SolverConfig cfg = cfg_;
  cfg.schedule.clear();
  return shape_exp2(ShapeVariation{base, v}, cfg, p_);
}

ShapeCalculus::Vector ShapeCalculus::log1(const Point& from,
                                          const Point& to) const {
  SolverConfig cfg = cfg_;
  cfg.schedule.clear();
  return shape_log(from, to, 1, cfg, p_).zeta;
}

ShapeCalculus::Point ShapeCalculus::midpoint(const Point& a,
                                             const Point& b) const {
  const GeodesicResult r =
      minimize_path(a, b, solver_config(a.mesh().level, 2), p_);
  return push_forward_mask(r.path.refs[1], r.path.defs[1],
                           /*check_orientation=*/false);
}

ShapeCalculus::Vector ShapeCalculus::scale(const Vector& v, double s) const {
  Vector out = v;
  for (double& x : out.x) x *= s;
  for (double& y : out.y) y *= s;
  return out;
}

ShapeCalculus::Vector ShapeCalculus::subtract(const Vector& a,
                                              const Vector& b) const {
  Vector out = a;
  for (std::size_t i = 0; i < out.x.size(); ++i) {
    out.x[i] -= b.x[i];
    out.y[i] -= b.y[i];
  }
  return out;
}

void TransportJob::validate() const {
  if (path.size() < 2)
    throw invalid_input("TransportJob: path needs at least two shapes");
  variation.validate();
  const int level = path.front().mesh().level;
  for (const auto& m : path)
    if (m.mesh().level != level)
      throw invalid_input("TransportJob: mask level mismatch");
  if (variation.base.mesh().level != level)
    throw invalid_input("TransportJob: variation level mismatch");
  if (symmetric_difference_area(variation.base, path.front()) > 0.0)
    throw invalid_input("TransportJob: variation base must equal the first shape");
}

namespace {

// One rung with edge subdivision: a refused smallness guard inserts the
// geodesic midpoint of (o_prev, o_next) and transports in two hops.
ShapeVariation transport_step_recursive(const ShapeCalculus& calc,
                                        const ShapeMask& o_prev,
                                        const ShapeMask& o_next,
                                        const ShapeVariation& zeta, int depth) {
  try {
    ShapeCalculus c = calc;
    const auto step = schild_step(c, o_prev, o_next, zeta.zeta);
    return ShapeVariation{o_next, step.transported};
  } catch (const step_too_large& e) {
    if (depth >= 3)
      throw step_too_large(std::string("transport_step: subdivision exhausted: ") +
                           e.what());
    const ShapeMask mid = calc.midpoint(o_prev, o_next);
    const ShapeVariation half =
        transport_step_recursive(calc, o_prev, mid, zeta, depth + 1);
    return transport_step_recursive(calc, mid, o_next, half, depth + 1);
  }
}

}  // namespace

ShapeVariation transport_step(const ShapeMask& o_prev, const ShapeMask& o_next,
                              const ShapeVariation& zeta,
                              const SolverConfig& cfg, const MaterialParams& p) {
  const ShapeCalculus calc(cfg, p);
  return transport_step_recursive(calc, o_prev, o_next, zeta, 0);
}

ShapeVariation transport_path(TransportJob& job, const SolverConfig& cfg,
                              const MaterialParams& p) {
  job.validate();
  ShapeCalculus calc(cfg, p);
  job.parallel_points.clear();
  job.cross_points.clear();

  try {
    const VectorField2 transported = schild_transport(
        calc, job.path, job.variation.zeta, &job.parallel_points,
        &job.cross_points);
    return ShapeVariation{job.path.back(), transported};
  } catch (const step_too_large&) {
    // fall back to stepwise transport with per-edge subdivision
    ShapeVariation carried = job.variation;
    for (std::size_t k = 1; k < job.path.size(); ++k) {
      try {
        carried = transport_step(job.path[k - 1], job.path[k], carried, cfg, p);
      } catch (const step_too_large& e) {
        throw step_too_large("transport_path: step " + std::to_string(k) +
                             " failed: " + e.what());
      }
    }
    return carried;
  }
}

ShapeVariation discrete_connection(
    const ShapeVariation& xi,
    const std::function<ShapeVariation(const ShapeMask&)>& eta, double tau,
    const SolverConfig& cfg, const MaterialParams& p) {
  if (!(tau > 0.0)) throw invalid_input("discrete_connection: tau must be > 0");
  ShapeCalculus calc(cfg, p);
  const ShapeMask o_tau = calc.exp1(xi.base, calc.scale(xi.zeta, tau));
  const std::vector<ShapeMask> edge{o_tau, xi.base};
  ShapeCalculus calc2(cfg, p);
  const VectorField2 transported =
      schild_transport(calc2, edge, eta(o_tau).zeta);
  const VectorField2 diff = calc.subtract(transported, eta(xi.base).zeta);
  return ShapeVariation{xi.base, calc.scale(diff, 1.0 / tau)};
}

}  // namespace shapeflow
