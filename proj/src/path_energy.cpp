#include "shapeflow/path_energy.hpp"

#include <cmath>
#include <limits>

#include "shapeflow/kernels.hpp"
#include "shapeflow/quadrature.hpp"
#include "shapeflow/smooth.hpp"
#include "shapeflow/warp.hpp"

namespace shapeflow {

DiscretePath DiscretePath::identity(const ShapeMask& source, int K) {
  if (K < 1) throw invalid_input("DiscretePath: K must be >= 1");
  DiscretePath path;
  path.K = K;
  path.mesh = source.mesh();
  path.refs.assign(K + 1, source);
  path.matchings.assign(K, Deformation(path.mesh));
  path.defs.assign(K + 1, Deformation(path.mesh));
  return path;
}

void DiscretePath::validate() const {
  if (K < 1) throw invalid_input("DiscretePath: K must be >= 1");
  if (static_cast<int>(refs.size()) != K + 1 ||
      static_cast<int>(matchings.size()) != K ||
      static_cast<int>(defs.size()) != K + 1)
    throw invalid_input("DiscretePath: inconsistent component counts");
  for (const auto& r : refs)
    if (r.mesh().level != mesh.level)
      throw invalid_input("DiscretePath: reference mask level mismatch");
  for (const auto& m : matchings)
    if (m.mesh().level != mesh.level)
      throw invalid_input("DiscretePath: matching level mismatch");
  for (const auto& d : defs)
    if (d.mesh().level != mesh.level)
      throw invalid_input("DiscretePath: deformation level mismatch");
}

double EnergyBreakdown::pair_sum() const {
  double s = 0.0;
  for (double w : pair) s += w;
  return s;
}

double EnergyBreakdown::reg_sum() const {
  double s = 0.0;
  for (double w : reg) s += w;
  return s;
}

namespace {

double interp(const ScalarField& f, const std::array<int, 3>& nodes,
              const std::array<double, 3>& bary) {
  return bary[0] * f.v[nodes[0]] + bary[1] * f.v[nodes[1]] +
         bary[2] * f.v[nodes[2]];
}

}  // namespace

double pair_energy(const ShapeMask& ref, const Deformation& matching,
                   const Deformation& prev, const Deformation& next,
                   const MaterialParams& p) {
  const Mesh& mesh = ref.mesh();
  const int nt = mesh.triangle_count();

  std::vector<double> a00, a01, a10, a11, coeff;
  a00.reserve(nt * 7);
  a01.reserve(nt * 7);
  a10.reserve(nt * 7);
  a11.reserve(nt * 7);
  coeff.reserve(nt * 7);

  for (int t = 0; t < nt; ++t) {
    const Matrix2 g_prev = prev.gradient(t);
    const double j_prev = g_prev.det();
    if (j_prev <= 0.0) return std::numeric_limits<double>::infinity();
    const Matrix2 c = matching.gradient(t) * g_prev.inverse();
    const auto nodes = mesh.triangle_nodes(t);
    for (const QuadPoint& q : quadrature_points(mesh, t)) {
      const double chi = interp(ref.chi, nodes, q.bary);
      const double chi_d1 = (1.0 - p.delta1) * chi + p.delta1;
      Vec2 y = q.x;
      for (int i = 0; i < 3; ++i) y += q.bary[i] * matching.u.node(nodes[i]);
      y = clamp_to_domain(y);
      const int elem = mesh.locate(y).tri;
      const Matrix2 a = next.gradient(elem) * c;
      a00.push_back(a.a00);
      a01.push_back(a.a01);
      a10.push_back(a.a10);
      a11.push_back(a.a11);
      coeff.push_back(q.w * chi_d1 * j_prev);
    }
  }
  return kern::weighted_energy_sum(a00.data(), a01.data(), a10.data(),
                                   a11.data(), coeff.data(), a00.size(), p);
}

double mismatch_penalty(const ShapeMask& ref, const ShapeMask& target,
                        const Deformation& phi, const MaterialParams& p) {
  const Mesh& mesh = ref.mesh();
  const ScalarField s_ref = gaussian_smooth(ref, p.delta2);
  const ScalarField s_tgt = gaussian_smooth(target, p.delta2);

  double acc = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto nodes = mesh.triangle_nodes(t);
    for (const QuadPoint& q : quadrature_points(mesh, t)) {
      Vec2 y = q.x;
      for (int i = 0; i < 3; ++i) y += q.bary[i] * phi.u.node(nodes[i]);
      const double r = interp(s_ref, nodes, q.bary) - s_tgt.eval(clamp_to_domain(y));
      acc += q.w * r * r;
    }
  }
  return acc / p.epsilon;
}

double deformation_regularizer(const Deformation& phi, const MaterialParams& p) {
  const Mesh& mesh = phi.mesh();
  const int nt = mesh.triangle_count();
  std::vector<double> a00(nt), a01(nt), a10(nt), a11(nt), coeff(nt);
  const double area = mesh.triangle_area();
  for (int t = 0; t < nt; ++t) {
    const Matrix2 g = phi.gradient(t);
    a00[t] = g.a00;
    a01[t] = g.a01;
    a10[t] = g.a10;
    a11[t] = g.a11;
    coeff[t] = area;
  }
  const double w = kern::weighted_energy_sum(a00.data(), a01.data(), a10.data(),
                                             a11.data(), coeff.data(), nt, p);
  return p.delta3 * w;
}

EnergyBreakdown total_energy(const DiscretePath& path, const ShapeMask& source,
                             const ShapeMask& target, const MaterialParams& p) {
  path.validate();
  EnergyBreakdown b;
  b.pair.resize(path.K);
  b.reg.resize(path.K + 1);
  for (int k = 1; k <= path.K; ++k)
    b.pair[k - 1] = pair_energy(path.refs[k - 1], path.matchings[k - 1],
                                path.defs[k - 1], path.defs[k], p);
  for (int k = 0; k <= path.K; ++k)
    b.reg[k] = deformation_regularizer(path.defs[k], p);
  b.penalty0 = mismatch_penalty(path.refs[0], source, path.defs[0], p);
  b.penaltyK = mismatch_penalty(path.refs[path.K], target, path.defs[path.K], p);
  b.total = path.K * b.pair_sum() + b.reg_sum() + b.penalty0 + b.penaltyK;
  return b;
}

std::vector<double> pair_energies(const DiscretePath& path,
                                  const MaterialParams& p) {
  std::vector<double> w(path.K);
  for (int k = 1; k <= path.K; ++k)
    w[k - 1] = pair_energy(path.refs[k - 1], path.matchings[k - 1],
                           path.defs[k - 1], path.defs[k], p);
  return w;
}

double discrete_length(const DiscretePath& path, const MaterialParams& p) {
  double l = 0.0;
  for (double w : pair_energies(path, p)) l += std::sqrt(w);
  return l;
}

double discrete_energy(const DiscretePath& path, const MaterialParams& p) {
  double e = 0.0;
  for (double w : pair_energies(path, p)) e += w;
  return path.K * e;
}

std::vector<ShapeMask> path_shapes(const DiscretePath& path) {
  std::vector<ShapeMask> shapes;
  shapes.reserve(path.K + 1);
  for (int k = 0; k <= path.K; ++k)
    shapes.push_back(push_forward_mask(path.refs[k], path.defs[k]));
  return shapes;
}

bool composed_gradients_regular(const DiscretePath& path) {
  const Mesh& mesh = path.mesh;
  for (int k = 1; k <= path.K; ++k) {
    const Deformation& prev = path.defs[k - 1];
    const Deformation& next = path.defs[k];
    const Deformation& match = path.matchings[k - 1];
    for (int t = 0; t < mesh.triangle_count(); ++t) {
      const Matrix2 g_prev = prev.gradient(t);
      if (g_prev.det() <= 0.0) return false;
      const Matrix2 c = match.gradient(t) * g_prev.inverse();
      const auto nodes = mesh.triangle_nodes(t);
      for (const QuadPoint& q : quadrature_points(mesh, t)) {
        Vec2 y = q.x;
        for (int i = 0; i < 3; ++i) y += q.bary[i] * match.u.node(nodes[i]);
        const int elem = mesh.locate(clamp_to_domain(y)).tri;
        if ((next.gradient(elem) * c).det() <= 0.0) return false;
      }
    }
  }
  return true;
}

std::vector<double> pair_energy_element_density(const DiscretePath& path,
                                                int k, const MaterialParams& p) {
  if (k < 1 || k > path.K)
    throw invalid_input("pair_energy_element_density: step index out of range");
  const Mesh& mesh = path.mesh;
  const ShapeMask& ref = path.refs[k - 1];
  const Deformation& match = path.matchings[k - 1];
  const Deformation& prev = path.defs[k - 1];
  const Deformation& next = path.defs[k];

  std::vector<double> density(mesh.triangle_count(), 0.0);
  const double area = mesh.triangle_area();
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const Matrix2 g_prev = prev.gradient(t);
    const double j_prev = g_prev.det();
    if (j_prev <= 0.0) {
      density[t] = std::numeric_limits<double>::infinity();
      continue;
    }
    const Matrix2 c = match.gradient(t) * g_prev.inverse();
    const auto nodes = mesh.triangle_nodes(t);
    double acc = 0.0;
    for (const QuadPoint& q : quadrature_points(mesh, t)) {
      const double chi = interp(ref.chi, nodes, q.bary);
      const double chi_d1 = (1.0 - p.delta1) * chi + p.delta1;
      Vec2 y = q.x;
      for (int i = 0; i < 3; ++i) y += q.bary[i] * match.u.node(nodes[i]);
      const int elem = mesh.locate(clamp_to_domain(y)).tri;
      acc += q.w * chi_d1 * energy_density(next.gradient(elem) * c, p) * j_prev;
    }
    density[t] = acc / area;
  }
  return density;
}

}  // namespace shapeflow
