#include "shapeflow/toy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "shapeflow/schild.hpp"

namespace shapeflow {

namespace {

Vec2 clamp_params(const EmbeddedSurface& s, Vec2 uv) {
  const Vec2 lo = s.param_lo();
  const Vec2 hi = s.param_hi();
  return {std::clamp(uv.x, lo.x, hi.x), std::clamp(uv.y, lo.y, hi.y)};
}

class PlaneSurface final : public EmbeddedSurface {
public:
  Vec3 at(Vec2 uv) const override { return {uv.x, uv.y, 0.0}; }
  void jacobian(Vec2, Vec3& du, Vec3& dv) const override {
    du = {1, 0, 0};
    dv = {0, 1, 0};
  }
  void second(Vec2, Vec3& duu, Vec3& duv, Vec3& dvv) const override {
    duu = duv = dvv = {0, 0, 0};
  }
  Vec2 param_lo() const override { return {-2.0, -2.0}; }
  Vec2 param_hi() const override { return {3.0, 3.0}; }
};

// (u, v) = (azimuth, polar angle), away from the poles
class SpherePatch final : public EmbeddedSurface {
public:
  Vec3 at(Vec2 uv) const override {
    return {std::sin(uv.y) * std::cos(uv.x), std::sin(uv.y) * std::sin(uv.x),
            std::cos(uv.y)};
  }
  void jacobian(Vec2 uv, Vec3& du, Vec3& dv) const override {
    const double su = std::sin(uv.x), cu = std::cos(uv.x);
    const double sv = std::sin(uv.y), cv = std::cos(uv.y);
    du = {-sv * su, sv * cu, 0.0};
    dv = {cv * cu, cv * su, -sv};
  }
  void second(Vec2 uv, Vec3& duu, Vec3& duv, Vec3& dvv) const override {
    const double su = std::sin(uv.x), cu = std::cos(uv.x);
    const double sv = std::sin(uv.y), cv = std::cos(uv.y);
    duu = {-sv * cu, -sv * su, 0.0};
    duv = {-cv * su, cv * cu, 0.0};
    dvv = {-sv * cu, -sv * su, -cv};
  }
  Vec2 param_lo() const override { return {-2.5, 0.35}; }
  Vec2 param_hi() const override { return {2.5, M_PI - 0.35}; }
};

class BumpSurface final : public EmbeddedSurface {
public:
  BumpSurface(double height, double width, Vec2 center)
      : h_(height), w2_(width * width), c_(center) {}

  double z(Vec2 uv) const {
    const Vec2 d = uv - c_;
    return h_ * std::exp(-(d.dot(d)) / w2_);
  }
  Vec3 at(Vec2 uv) const override { return {uv.x, uv.y, z(uv)}; }
  void jacobian(Vec2 uv, Vec3& du, Vec3& dv) const override {
    const Vec2 d = uv - c_;
    const double zz = z(uv);
    du = {1, 0, -2.0 * d.x / w2_ * zz};
    dv = {0, 1, -2.0 * d.y / w2_ * zz};
  }
  void second(Vec2 uv, Vec3& duu, Vec3& duv, Vec3& dvv) const override {
    const Vec2 d = uv - c_;
    const double zz = z(uv);
    const double s = 2.0 / w2_;
    duu = {0, 0, zz * (s * s * d.x * d.x - s)};
    duv = {0, 0, zz * s * s * d.x * d.y};
    dvv = {0, 0, zz * (s * s * d.y * d.y - s)};
  }
  Vec2 param_lo() const override { return {0.0, 0.0}; }
  Vec2 param_hi() const override { return {1.0, 1.0}; }

private:
  double h_;
  double w2_;
  Vec2 c_;
};

}  // namespace

Vec2 EmbeddedSurface::project(Vec3 target, Vec2 seed) const {
  Vec2 uv = clamp_params(*this, seed);
  for (int iter = 0; iter < 60; ++iter) {
    const Vec3 r = at(uv) - target;
    Vec3 du, dv;
    jacobian(uv, du, dv);
    const double g0 = r.dot(du), g1 = r.dot(dv);
    // Gauss-Newton on |P(uv) - target|^2
    const double a = du.dot(du), b = du.dot(dv), c = dv.dot(dv);
    const double det = a * c - b * b;
    if (std::abs(det) < 1e-300) break;
    const Vec2 step{-(c * g0 - b * g1) / det, -(a * g1 - b * g0) / det};
    uv = clamp_params(*this, uv + step);
    if (step.norm() <= 1e-14) break;
  }
  return uv;
}

std::unique_ptr<EmbeddedSurface> make_plane() {
  return std::make_unique<PlaneSurface>();
}
std::unique_ptr<EmbeddedSurface> make_unit_sphere_patch() {
  return std::make_unique<SpherePatch>();
}
std::unique_ptr<EmbeddedSurface> make_bump_surface(double height, double width,
                                                   Vec2 center) {
  return std::make_unique<BumpSurface>(height, width, center);
}

double ToyPath::energy() const {
  double e = 0.0;
  for (const Vec3& s : steps) e += s.norm_sq();
  return e;
}

double ToyPath::length() const {
  double l = 0.0;
  for (const Vec3& s : steps) l += s.norm();
  return l;
}

double ToyPath::max_step() const {
  double m = 0.0;
  for (const Vec3& s : steps) m = std::max(m, s.norm());
  return m;
}

namespace {

ToyPath assemble_path(const EmbeddedSurface& surface,
                      const std::vector<Vec2>& params) {
  ToyPath path;
  path.params = params;
  for (const Vec2& p : params) path.positions.push_back(surface.at(p));
  for (std::size_t k = 1; k < params.size(); ++k)
    path.steps.push_back(path.positions[k] - path.positions[k - 1]);
  return path;
}

double chain_energy(const EmbeddedSurface& surface, const std::vector<Vec2>& x) {
  double e = 0.0;
  Vec3 prev = surface.at(x[0]);
  for (std::size_t k = 1; k < x.size(); ++k) {
    const Vec3 cur = surface.at(x[k]);
    e += (cur - prev).norm_sq();
    prev = cur;
  }
  return e;
}

}  // namespace

ToyPath toy_discrete_geodesic(const EmbeddedSurface& surface, Vec2 a, Vec2 b,
                              int K) {
  if (K < 1) throw invalid_input("toy_discrete_geodesic: K must be >= 1");
  std::vector<Vec2> x(K + 1);
  for (int k = 0; k <= K; ++k) {
    const double t = static_cast<double>(k) / K;
    x[k] = clamp_params(surface, a + t * (b - a));
  }
  if (K == 1) return assemble_path(surface, x);

  const int n = 2 * (K - 1);
  double energy = chain_energy(surface, x);
  double shift = 0.0;

  for (int iter = 0; iter < 200; ++iter) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);

    std::vector<Vec3> pos(K + 1);
    for (int k = 0; k <= K; ++k) pos[k] = surface.at(x[k]);

    for (int k = 1; k < K; ++k) {
      Vec3 du, dv, duu, duv, dvv;
      surface.jacobian(x[k], du, dv);
      surface.second(x[k], duu, duv, dvv);
      const Vec3 r = 2.0 * pos[k] - pos[k - 1] - pos[k + 1];
      const int i = 2 * (k - 1);
      grad[i] = 2.0 * r.dot(du);
      grad[i + 1] = 2.0 * r.dot(dv);
      hess(i, i) += 2.0 * (2.0 * du.dot(du) + r.dot(duu));
      hess(i, i + 1) += 2.0 * (2.0 * du.dot(dv) + r.dot(duv));
      hess(i + 1, i) += 2.0 * (2.0 * du.dot(dv) + r.dot(duv));
      hess(i + 1, i + 1) += 2.0 * (2.0 * dv.dot(dv) + r.dot(dvv));
      if (k + 1 < K) {
        Vec3 du2, dv2;
        surface.jacobian(x[k + 1], du2, dv2);
        const int j = 2 * k;
        const double h00 = -2.0 * du.dot(du2);
        const double h01 = -2.0 * du.dot(dv2);
        const double h10 = -2.0 * dv.dot(du2);
        const double h11 = -2.0 * dv.dot(dv2);
        hess(i, j) += h00;
        hess(i, j + 1) += h01;
        hess(i + 1, j) += h10;
        hess(i + 1, j + 1) += h11;
        hess(j, i) += h00;
        hess(j + 1, i) += h01;
        hess(j, i + 1) += h10;
        hess(j + 1, i + 1) += h11;
      }
    }

    if (grad.lpNorm<Eigen::Infinity>() <= 1e-13 * (1.0 + energy)) break;

    // Levenberg-damped Newton step with Armijo backtracking
    Eigen::VectorXd step;
    for (;;) {
      Eigen::MatrixXd h = hess;
      for (int i = 0; i < n; ++i) h(i, i) += shift;
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
      step = ldlt.solve(-grad);
      if (ldlt.info() == Eigen::Success && grad.dot(step) < 0.0) break;
      shift = std::max(1e-8, shift * 10.0);
      if (shift > 1e12)
        throw solver_failure("toy_discrete_geodesic: cannot find descent step");
    }
    double alpha = 1.0;
    bool moved = false;
    while (alpha >= 1e-8) {
      std::vector<Vec2> x_next = x;
      for (int k = 1; k < K; ++k)
        x_next[k] = clamp_params(
            surface, x[k] + alpha * Vec2{step[2 * (k - 1)], step[2 * k - 1]});
      const double e_next = chain_energy(surface, x_next);
      if (e_next < energy - 1e-12 * alpha * std::abs(grad.dot(step))) {
        x = std::move(x_next);
        energy = e_next;
        moved = true;
        shift = shift * 0.3;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) {
      shift = std::max(1e-6, shift * 30.0);
      if (shift > 1e12) break;
    }
  }
  return assemble_path(surface, x);
}

Vec3 sphere_log(Vec3 a, Vec3 b) {
  const double cosang = std::clamp(a.dot(b), -1.0, 1.0);
  const double ang = std::acos(cosang);
  const Vec3 w = b - cosang * a;
  const double wn = w.norm();
  if (wn < 1e-15) return {0, 0, 0};
  return (ang / wn) * w;
}

Vec3 sphere_exp(Vec3 a, Vec3 tangent) {
  const double ang = tangent.norm();
  if (ang < 1e-15) return a;
  const Vec3 w = tangent * (1.0 / ang);
  return std::cos(ang) * a + std::sin(ang) * w;
}

ToyCalculus::Point ToyCalculus::exp1(const Point& base, const Vector& v) const {
  // (id + zeta) realized as the nearest surface point to base + zeta
  Vec3 du, dv;
  surface_.jacobian(base, du, dv);
  // parameter-space seed from the pseudo-inverse of the Jacobian
  const double a = du.dot(du), b = du.dot(dv), c = dv.dot(dv);
  const double det = a * c - b * b;
  const double g0 = v.dot(du), g1 = v.dot(dv);
  const Vec2 seed = base + Vec2{(c * g0 - b * g1) / det, (a * g1 - b * g0) / det};
  return surface_.project(surface_.at(base) + v, seed);
}

ToyCalculus::Point ToyCalculus::midpoint(const Point& pa, const Point& pb) const {
  const Vec3 a = surface_.at(pa);
  const Vec3 b = surface_.at(pb);
  // minimize |P(m)-a|^2 + |b-P(m)|^2 by Gauss-Newton in parameters
  Vec2 m = clamp_params(surface_, pa + 0.5 * (pb - pa));
  for (int iter = 0; iter < 80; ++iter) {
    Vec3 du, dv, duu, duv, dvv;
    surface_.jacobian(m, du, dv);
    surface_.second(m, duu, duv, dvv);
    const Vec3 r = 2.0 * surface_.at(m) - a - b;
    const double g0 = 2.0 * r.dot(du), g1 = 2.0 * r.dot(dv);
    const double h00 = 2.0 * (2.0 * du.dot(du) + r.dot(duu));
    const double h01 = 2.0 * (2.0 * du.dot(dv) + r.dot(duv));
    const double h11 = 2.0 * (2.0 * dv.dot(dv) + r.dot(dvv));
    const double det = h00 * h11 - h01 * h01;
    Vec2 step;
    if (det > 1e-300 && h00 > 0) {
      step = {-(h11 * g0 - h01 * g1) / det, -(h00 * g1 - h01 * g0) / det};
    } else {
      step = {-g0, -g1};
    }
    m = clamp_params(surface_, m + step);
    if (step.norm() <= 1e-14) break;
  }
  return m;
}

ToyCalculus::Vector ToyCalculus::log1(const Point& from, const Point& to) const {
  return surface_.at(to) - surface_.at(from);
}

ToyCalculus::Point ToyCalculus::exp2(const Point& base, const Vector& v) const {
  // find q with midpoint(base, q) = exp1(base, v): 2x2 Newton with a
  // finite-difference Jacobian
  const Vec2 mstar = exp1(base, v);
  Vec2 q = exp1(base, 2.0 * v);
  const double fd = 1e-7;
  for (int iter = 0; iter < 60; ++iter) {
    const Vec2 f = midpoint(base, q) - mstar;
    if (f.norm() <= 1e-12) break;
    const Vec2 fu = midpoint(base, clamp_params(surface_, q + Vec2{fd, 0})) - mstar;
    const Vec2 fv = midpoint(base, clamp_params(surface_, q + Vec2{0, fd})) - mstar;
    const double j00 = (fu.x - f.x) / fd, j01 = (fv.x - f.x) / fd;
    const double j10 = (fu.y - f.y) / fd, j11 = (fv.y - f.y) / fd;
    const double det = j00 * j11 - j01 * j10;
    if (std::abs(det) < 1e-300)
      throw step_too_large("toy exp2: singular Newton system");
    const Vec2 step{-(j11 * f.x - j01 * f.y) / det,
                    -(j00 * f.y - j10 * f.x) / det};
    q = clamp_params(surface_, q + step);
    if (step.norm() <= 1e-14) break;
  }
  return q;
}

std::vector<ConvergenceRow> toy_log_exp_convergence(
    const EmbeddedSurface& surface, Vec2 a, Vec2 b, const std::vector<int>& Ks) {
  const Vec3 pa = surface.at(a);
  const Vec3 pb = surface.at(b);

  // analytic log: sphere formula if |P|=1 on this surface, else the flat chord
  const bool spherical = std::abs(pa.norm() - 1.0) < 1e-12 &&
                         std::abs(pb.norm() - 1.0) < 1e-12;
  const Vec3 log_ab = spherical ? sphere_log(pa, pb) : (pb - pa);
  const Vec3 exp_target = pb;

  ToyCalculus calc(surface);
  std::vector<ConvergenceRow> rows;
  for (int K : Ks) {
    ConvergenceRow row;
    row.K = K;

    const ToyPath geo = toy_discrete_geodesic(surface, a, b, K);
    const Vec3 zeta1 = geo.steps.front();
    row.log_error = (static_cast<double>(K) * zeta1 - log_ab).norm();

    // discrete flow started with the scaled analytic log
    const Vec3 step_v = log_ab * (1.0 / K);
    Vec2 prev2 = a;
    Vec2 prev1 = calc.exp1(a, step_v);
    for (int j = 2; j <= K; ++j) {
      const Vec3 zeta = (j == 2) ? step_v : calc.log1(prev2, prev1);
      const Vec2 next = calc.exp2(prev2, zeta);
      prev2 = prev1;
      prev1 = next;
    }
    row.exp_error = (surface.at(prev1) - exp_target).norm();
    rows.push_back(row);
  }
  return rows;
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("write_convergence_csv: cannot open " + path);
  out << "K,log_error,exp_error\n";
  out.precision(12);
  for (const auto& r : rows)
    out << r.K << ',' << r.log_error << ',' << r.exp_error << '\n';
}

ShortcutReport toy_length_energy_shortcut(const EmbeddedSurface& surface,
                                          Vec2 a, Vec2 b,
                                          const std::vector<int>& Ks,
                                          int grid_n) {
  const Vec2 lo = surface.param_lo();
  const Vec2 hi = surface.param_hi();
  const int n_states = grid_n * grid_n;

  std::vector<Vec3> pos(n_states);
  for (int iy = 0; iy < grid_n; ++iy)
    for (int ix = 0; ix < grid_n; ++ix) {
      const Vec2 uv{lo.x + (hi.x - lo.x) * ix / (grid_n - 1.0),
                    lo.y + (hi.y - lo.y) * iy / (grid_n - 1.0)};
      pos[iy * grid_n + ix] = surface.at(uv);
    }
  const Vec3 pa = surface.at(a);
  const Vec3 pb = surface.at(b);

  ShortcutReport report;
  report.ambient_gap = (pb - pa).norm();

  // exhaustive DP over on-grid interior tuples for either objective
  auto solve = [&](int K, bool squared) {
    std::vector<double> cost(n_states);
    std::vector<std::vector<int>> from(K, std::vector<int>(n_states, -1));
    std::vector<double> best(n_states), next(n_states);
    auto edge = [&](const Vec3& p, const Vec3& q) {
      const double d2 = (q - p).norm_sq();
      return squared ? d2 : std::sqrt(d2);
    };
    for (int s = 0; s < n_states; ++s) best[s] = edge(pa, pos[s]);
    for (int layer = 2; layer < K; ++layer) {
      for (int s = 0; s < n_states; ++s) {
        double bv = 1e300;
        int barg = -1;
        for (int t = 0; t < n_states; ++t) {
          const double c = best[t] + edge(pos[t], pos[s]);
          if (c < bv) {
            bv = c;
            barg = t;
          }
        }
        next[s] = bv;
        from[layer - 1][s] = barg;
      }
      std::swap(best, next);
    }
    double total = 1e300;
    int arg = -1;
    for (int s = 0; s < n_states; ++s) {
      const double c = best[s] + edge(pos[s], pb);
      if (c < total) {
        total = c;
        arg = s;
      }
    }
    // reconstruct and measure the largest step
    std::vector<Vec3> points(K + 1);
    points[0] = pa;
    points[K] = pb;
    int cur = arg;
    for (int layer = K - 1; layer >= 1; --layer) {
      points[layer] = pos[cur];
      cur = from[layer][cur] >= 0 ? from[layer][cur] : cur;
    }
    double max_step = 0.0;
    for (int k = 1; k <= K; ++k)
      max_step = std::max(max_step, (points[k] - points[k - 1]).norm());
    return std::pair<double, double>{total, max_step};
  };

  for (int K : Ks) {
    ShortcutRow row;
    row.K = K;
    const auto [ev, ems] = solve(K, /*squared=*/true);
    const auto [lv, lms] = solve(K, /*squared=*/false);
    row.energy_value = ev;
    row.energy_max_step = ems;
    row.length_value = lv;
    row.length_max_step = lms;
    report.rows.push_back(row);
  }
  return report;
}

double toy_transport_holonomy(const EmbeddedSurface& surface,
                              const std::array<Vec2, 3>& triangle,
                              int rungs_per_edge) {
  // closed discrete path around the triangle, each edge a discrete geodesic
  std::vector<Vec2> loop;
  for (int e = 0; e < 3; ++e) {
    const ToyPath edge = toy_discrete_geodesic(
        surface, triangle[e], triangle[(e + 1) % 3], rungs_per_edge);
    for (std::size_t i = 0; i + 1 < edge.params.size(); ++i)
      loop.push_back(edge.params[i]);
  }
  loop.push_back(triangle[0]);

  // small tangent vector at the start, comparable to one rung
  Vec3 du, dv;
  surface.jacobian(triangle[0], du, dv);
  const double scale =
      0.5 * (surface.at(loop[1]) - surface.at(loop[0])).norm();
  Vec3 v0 = du * (scale / du.norm());

  ToyCalculus calc(surface);
  const Vec3 v1 = schild_transport(calc, loop, v0);

  // signed angle between the projections onto the tangent plane at the start
  Vec3 n = surface.normal(triangle[0]);
  n = n * (1.0 / n.norm());
  auto tangential = [&](Vec3 w) { return w - n * w.dot(n); };
  const Vec3 t0 = tangential(v0);
  const Vec3 t1 = tangential(v1);
  const double cosv = t0.dot(t1) / (t0.norm() * t1.norm());
  const double sinv = n.dot(t0.cross(t1)) / (t0.norm() * t1.norm());
  return std::atan2(sinv, cosv);
}

}  // namespace shapeflow
