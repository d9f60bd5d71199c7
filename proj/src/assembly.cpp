#include "shapeflow/assembly.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "shapeflow/kernels.hpp"
#include "shapeflow/quadrature.hpp"
#include "shapeflow/smooth.hpp"

namespace shapeflow {

namespace {

constexpr int kQ = 7;

double interp(const std::vector<double>& v, const std::array<int, 3>& nodes,
              const std::array<double, 3>& bary) {
  return bary[0] * v[nodes[0]] + bary[1] * v[nodes[1]] +
         bary[2] * v[nodes[2]];
}

}  // namespace

PathObjective::PathObjective(const DiscretePath& path, const ShapeMask& source,
                             const ShapeMask& target, const MaterialParams& p)
    : mesh_(path.mesh),
      K_(path.K),
      nv_(path.mesh.vertex_count()),
      nt_(path.mesh.triangle_count()),
      p_(p),
      kfac_(path.K),
      matchings_(path.matchings) {
  path.validate();
  p_.validate();
  if (source.mesh().level != mesh_.level || target.mesh().level != mesh_.level)
    throw invalid_input("PathObjective: endpoint mask level mismatch");

  defs_.assign(K_ + 1, Deformation(mesh_));
  const std::size_t batch = static_cast<std::size_t>(nt_) * kQ;
  b00_.resize(batch);
  b01_.resize(batch);
  b10_.resize(batch);
  b11_.resize(batch);
  bco_.resize(batch);
  bw_.resize(batch);
  g00_.resize(batch);
  g01_.resize(batch);
  g10_.resize(batch);
  g11_.resize(batch);

  build_caches(path.refs, source, target);
  build_pattern();
}

void PathObjective::build_caches(const std::vector<ShapeMask>& refs,
                                 const ShapeMask& source,
                                 const ShapeMask& target) {
  mat_p_.resize(static_cast<std::size_t>(K_) * nt_);
  chi_d1_.resize(static_cast<std::size_t>(K_) * nt_ * kQ);
  next_elem_.resize(static_cast<std::size_t>(K_) * nt_ * kQ);

  for (int k = 1; k <= K_; ++k) {
    const ShapeMask& ref = refs[k - 1];
    const Deformation& match = matchings_[k - 1];
    const std::size_t base_t = static_cast<std::size_t>(k - 1) * nt_;
    for (int t = 0; t < nt_; ++t) {
      mat_p_[base_t + t] = match.gradient(t);
      const auto nodes = mesh_.triangle_nodes(t);
      const auto qs = quadrature_points(mesh_, t);
      for (int q = 0; q < kQ; ++q) {
        const double chi = interp(ref.chi.v, nodes, qs[q].bary);
        Vec2 y = qs[q].x;
        for (int i = 0; i < 3; ++i) y += qs[q].bary[i] * match.u.node(nodes[i]);
        const std::size_t idx = (base_t + t) * kQ + q;
        chi_d1_[idx] = (1.0 - p_.delta1) * chi + p_.delta1;
        next_elem_[idx] = mesh_.locate(clamp_to_domain(y)).tri;
      }
    }
  }

  const ScalarField s_ref0 = gaussian_smooth(refs[0], p_.delta2);
  const ScalarField s_refk = gaussian_smooth(refs[K_], p_.delta2);
  stgt0_ = gaussian_smooth(source, p_.delta2);
  stgtk_ = gaussian_smooth(target, p_.delta2);

  sref0_.resize(static_cast<std::size_t>(nt_) * kQ);
  srefk_.resize(static_cast<std::size_t>(nt_) * kQ);
  for (int t = 0; t < nt_; ++t) {
    const auto nodes = mesh_.triangle_nodes(t);
    const auto qs = quadrature_points(mesh_, t);
    for (int q = 0; q < kQ; ++q) {
      sref0_[t * kQ + q] = interp(s_ref0.v, nodes, qs[q].bary);
      srefk_[t * kQ + q] = interp(s_refk.v, nodes, qs[q].bary);
    }
  }
}

void PathObjective::build_pattern() {
  const int dim = dof_count();
  std::vector<std::int64_t> keys;
  keys.reserve(static_cast<std::size_t>(K_) * nt_ * 600);

  auto add_block = [&](int kr, const std::array<int, 3>& rn, int kc,
                       const std::array<int, 3>& cn) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            keys.push_back(static_cast<std::int64_t>(dof(kr, rn[i], a)) * dim +
                           dof(kc, cn[j], b));
  };

  for (int t = 0; t < nt_; ++t) {
    const auto tn = mesh_.triangle_nodes(t);
    for (int k = 0; k <= K_; ++k) add_block(k, tn, k, tn);  // regularizer, penalty
    for (int k = 1; k <= K_; ++k) {
      add_block(k - 1, tn, k - 1, tn);  // pair, prev-prev
      const std::size_t base = (static_cast<std::size_t>(k - 1) * nt_ + t) * kQ;
      int seen[kQ];
      int n_seen = 0;
      for (int q = 0; q < kQ; ++q) {
        const int e = next_elem_[base + q];
        bool dup = false;
        for (int s = 0; s < n_seen; ++s) dup = dup || seen[s] == e;
        if (dup) continue;
        seen[n_seen++] = e;
        const auto en = mesh_.triangle_nodes(e);
        add_block(k, en, k, en);      // next-next
        add_block(k - 1, tn, k, en);  // mixed
        add_block(k, en, k - 1, tn);
      }
    }
  }

  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(keys.size());
  for (std::int64_t key : keys)
    trips.emplace_back(static_cast<int>(key / dim), static_cast<int>(key % dim),
                       0.0);
  hess_.resize(dim, dim);
  hess_.setFromTriplets(trips.begin(), trips.end());
  hess_.makeCompressed();
}

void PathObjective::add_entry(int r, int c, double v) {
  const int* outer = hess_.outerIndexPtr();
  const int* inner = hess_.innerIndexPtr();
  double* vals = hess_.valuePtr();
  const int* lo = inner + outer[c];
  const int* hi = inner + outer[c + 1];
  const int* it = std::lower_bound(lo, hi, r);
  assert(it != hi && *it == r);
  vals[it - inner] += v;
}

Eigen::VectorXd PathObjective::pack(const std::vector<Deformation>& defs) const {
  Eigen::VectorXd z(dof_count());
  for (int k = 0; k <= K_; ++k)
    for (int v = 0; v < nv_; ++v) {
      z[dof(k, v, 0)] = defs[k].u.x[v];
      z[dof(k, v, 1)] = defs[k].u.y[v];
    }
  return z;
}

std::vector<Deformation> PathObjective::unpack(const Eigen::VectorXd& z) const {
  unpack_into(z);
  return defs_;
}

void PathObjective::unpack_into(const Eigen::VectorXd& z) const {
  for (int k = 0; k <= K_; ++k)
    for (int v = 0; v < nv_; ++v) {
      defs_[k].u.x[v] = z[dof(k, v, 0)];
      defs_[k].u.y[v] = z[dof(k, v, 1)];
    }
}

double PathObjective::energy(const Eigen::VectorXd& z,
                             EnergyBreakdown* out) const {
  unpack_into(z);
  const double inf = std::numeric_limits<double>::infinity();
  EnergyBreakdown b;
  b.pair.assign(K_, 0.0);
  b.reg.assign(K_ + 1, 0.0);

  // pair terms
  for (int k = 1; k <= K_; ++k) {
    const Deformation& prev = defs_[k - 1];
    const Deformation& next = defs_[k];
    const std::size_t base_t = static_cast<std::size_t>(k - 1) * nt_;
    bool singular = false;
    std::size_t m = 0;
    for (int t = 0; t < nt_ && !singular; ++t) {
      const Matrix2 g = prev.gradient(t);
      const double j = g.det();
      if (j <= 0.0) {
        singular = true;
        break;
      }
      const Matrix2 c = mat_p_[base_t + t] * g.inverse();
      const auto qs = quadrature_points(mesh_, t);
      const std::size_t qbase = (base_t + t) * kQ;
      for (int q = 0; q < kQ; ++q, ++m) {
        const Matrix2 a = next.gradient(next_elem_[qbase + q]) * c;
        b00_[m] = a.a00;
        b01_[m] = a.a01;
        b10_[m] = a.a10;
        b11_[m] = a.a11;
        bco_[m] = qs[q].w * chi_d1_[qbase + q] * j;
      }
    }
    if (singular) {
      b.pair[k - 1] = inf;
      b.total = inf;
      if (out) *out = b;
      return inf;
    }
    const double w = kern::weighted_energy_sum(b00_.data(), b01_.data(),
                                               b10_.data(), b11_.data(),
                                               bco_.data(), m, p_);
    if (!std::isfinite(w)) {
      b.pair[k - 1] = inf;
      b.total = inf;
      if (out) *out = b;
      return inf;
    }
    b.pair[k - 1] = w;
  }

  // regularizers
  const double area = mesh_.triangle_area();
  for (int k = 0; k <= K_; ++k) {
    for (int t = 0; t < nt_; ++t) {
      const Matrix2 g = defs_[k].gradient(t);
      b00_[t] = g.a00;
      b01_[t] = g.a01;
      b10_[t] = g.a10;
      b11_[t] = g.a11;
      bco_[t] = area;
    }
    const double w = kern::weighted_energy_sum(b00_.data(), b01_.data(),
                                               b10_.data(), b11_.data(),
                                               bco_.data(), nt_, p_);
    if (!std::isfinite(w)) {
      b.reg[k] = inf;
      b.total = inf;
      if (out) *out = b;
      return inf;
    }
    b.reg[k] = p_.delta3 * w;
  }

  // endpoint penalties
  auto penalty = [&](const std::vector<double>& sref, const ScalarField& stgt,
                     const Deformation& phi) {
    double acc = 0.0;
    for (int t = 0; t < nt_; ++t) {
      const auto nodes = mesh_.triangle_nodes(t);
      const auto qs = quadrature_points(mesh_, t);
      for (int q = 0; q < kQ; ++q) {
        Vec2 y = qs[q].x;
        for (int i = 0; i < 3; ++i) y += qs[q].bary[i] * phi.u.node(nodes[i]);
        const double r = sref[t * kQ + q] - stgt.eval(clamp_to_domain(y));
        acc += qs[q].w * r * r;
      }
    }
    return acc / p_.epsilon;
  };
  b.penalty0 = penalty(sref0_, stgt0_, defs_[0]);
  b.penaltyK = penalty(srefk_, stgtk_, defs_[K_]);

  b.total = kfac_ * b.pair_sum() + b.reg_sum() + b.penalty0 + b.penaltyK;
  if (out) *out = b;
  return b.total;
}

Eigen::VectorXd PathObjective::gradient(const Eigen::VectorXd& z) const {
  unpack_into(z);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(dof_count());

  // pair terms
  for (int k = 1; k <= K_; ++k) {
    const Deformation& prev = defs_[k - 1];
    const Deformation& next = defs_[k];
    const std::size_t base_t = static_cast<std::size_t>(k - 1) * nt_;

    std::size_t m = 0;
    for (int t = 0; t < nt_; ++t) {
      const Matrix2 g = prev.gradient(t);
      const double j = g.det();
      if (j <= 0.0)
        throw singular_deformation("PathObjective::gradient at infeasible point");
      const Matrix2 c = mat_p_[base_t + t] * g.inverse();
      const auto qs = quadrature_points(mesh_, t);
      const std::size_t qbase = (base_t + t) * kQ;
      for (int q = 0; q < kQ; ++q, ++m) {
        const Matrix2 a = next.gradient(next_elem_[qbase + q]) * c;
        b00_[m] = a.a00;
        b01_[m] = a.a01;
        b10_[m] = a.a10;
        b11_[m] = a.a11;
        bco_[m] = kfac_ * qs[q].w * chi_d1_[qbase + q] * j;
      }
    }
    kern::energy_values(b00_.data(), b01_.data(), b10_.data(), b11_.data(),
                        bw_.data(), m, p_);
    kern::weighted_energy_and_stress(b00_.data(), b01_.data(), b10_.data(),
                                     b11_.data(), bco_.data(), m, p_,
                                     g00_.data(), g01_.data(), g10_.data(),
                                     g11_.data());

    m = 0;
    for (int t = 0; t < nt_; ++t) {
      const Matrix2 g = prev.gradient(t);
      const Matrix2 ginv = g.inverse();
      const Matrix2 c = mat_p_[base_t + t] * ginv;
      const Matrix2 ct = c.transposed();
      const Matrix2 ginv_t = ginv.transposed();
      const Matrix2 cof_g = g.cofactor();
      const auto tn = mesh_.triangle_nodes(t);
      const auto tg = mesh_.basis_gradients(t);
      const auto qs = quadrature_points(mesh_, t);
      const std::size_t qbase = (base_t + t) * kQ;
      for (int q = 0; q < kQ; ++q, ++m) {
        const int e = next_elem_[qbase + q];
        const auto en = mesh_.triangle_nodes(e);
        const auto eg = mesh_.basis_gradients(e);
        const Matrix2 a(b00_[m], b01_[m], b10_[m], b11_[m]);
        // dw_s = kfac * wq * chi * j * DW(A)
        const Matrix2 dw_s(g00_[m], g01_[m], g10_[m], g11_[m]);

        // next side: d/d u_k[node j, comp a] = (DW_s (C^T gnext_j))[a]
        for (int jn = 0; jn < 3; ++jn) {
          const Vec2 pj = ct * eg[jn];
          grad[dof(k, en[jn], 0)] += dw_s.row(0).dot(pj);
          grad[dof(k, en[jn], 1)] += dw_s.row(1).dot(pj);
        }

        // prev side: T_prev = -A^T DW_s Ginv^T + (c0 w) Cof(G)
        const double c0w = kfac_ * qs[q].w * chi_d1_[qbase + q] * bw_[m];
        const Matrix2 t_prev =
            (a.transposed() * dw_s * ginv_t) * -1.0 + c0w * cof_g;
        for (int in = 0; in < 3; ++in) {
          const Vec2 r = t_prev * tg[in];
          grad[dof(k - 1, tn[in], 0)] += r.x;
          grad[dof(k - 1, tn[in], 1)] += r.y;
        }
      }
    }
  }

  // regularizers
  const double area = mesh_.triangle_area();
  for (int k = 0; k <= K_; ++k) {
    for (int t = 0; t < nt_; ++t) {
      const Matrix2 g = defs_[k].gradient(t);
      const Matrix2 dw = energy_density_gradient(g, p_) * (p_.delta3 * area);
      const auto tn = mesh_.triangle_nodes(t);
      const auto tg = mesh_.basis_gradients(t);
      for (int in = 0; in < 3; ++in) {
        const Vec2 r = dw * tg[in];
        grad[dof(k, tn[in], 0)] += r.x;
        grad[dof(k, tn[in], 1)] += r.y;
      }
    }
  }

  // endpoint penalties
  auto penalty_grad = [&](const std::vector<double>& sref,
                          const ScalarField& stgt, const Deformation& phi,
                          int k) {
    const double scale = 2.0 / p_.epsilon;
    for (int t = 0; t < nt_; ++t) {
      const auto nodes = mesh_.triangle_nodes(t);
      const auto qs = quadrature_points(mesh_, t);
      for (int q = 0; q < kQ; ++q) {
        Vec2 yr = qs[q].x;
        for (int i = 0; i < 3; ++i) yr += qs[q].bary[i] * phi.u.node(nodes[i]);
        const Vec2 y = clamp_to_domain(yr);
        const Mesh::Location loc = mesh_.locate(y);
        const auto ln = mesh_.triangle_nodes(loc.tri);
        double sval = 0.0;
        for (int i = 0; i < 3; ++i) sval += loc.bary[i] * stgt.v[ln[i]];
        const double r = sref[t * kQ + q] - sval;
        Vec2 d = stgt.element_gradient(loc.tri);
        if (yr.x != y.x) d.x = 0.0;  // clamped: no sensitivity
        if (yr.y != y.y) d.y = 0.0;
        const double f = scale * qs[q].w * r;
        for (int i = 0; i < 3; ++i) {
          grad[dof(k, nodes[i], 0)] -= f * d.x * qs[q].bary[i];
          grad[dof(k, nodes[i], 1)] -= f * d.y * qs[q].bary[i];
        }
      }
    }
  };
  penalty_grad(sref0_, stgt0_, defs_[0], 0);
  penalty_grad(srefk_, stgtk_, defs_[K_], K_);

  return grad;
}

const Eigen::SparseMatrix<double>& PathObjective::hessian(
    const Eigen::VectorXd& z) {
  unpack_into(z);
  std::fill(hess_.valuePtr(), hess_.valuePtr() + hess_.nonZeros(), 0.0);

  // pair terms
  for (int k = 1; k <= K_; ++k) {
    const Deformation& prev = defs_[k - 1];
    const Deformation& next = defs_[k];
    const std::size_t base_t = static_cast<std::size_t>(k - 1) * nt_;

    for (int t = 0; t < nt_; ++t) {
      const Matrix2 g = prev.gradient(t);
      const double j = g.det();
      if (j <= 0.0)
        throw singular_deformation("PathObjective::hessian at infeasible point");
      const Matrix2 ginv = g.inverse();
      const Matrix2 ginv_t = ginv.transposed();
      const Matrix2 c = mat_p_[base_t + t] * ginv;
      const Matrix2 ct = c.transposed();
      const auto tn = mesh_.triangle_nodes(t);
      const auto tg = mesh_.basis_gradients(t);
      const auto qs = quadrature_points(mesh_, t);
      const std::size_t qbase = (base_t + t) * kQ;

      // q_i = Ginv^T gamma_i for the three prev-side nodes
      Vec2 qi[3];
      for (int i = 0; i < 3; ++i) qi[i] = ginv_t * tg[i];

      for (int q = 0; q < kQ; ++q) {
        const int e = next_elem_[qbase + q];
        const auto en = mesh_.triangle_nodes(e);
        const auto eg = mesh_.basis_gradients(e);
        const Matrix2 a = next.gradient(e) * c;
        const double w = energy_density(a, p_);
        const Matrix2 dw = energy_density_gradient(a, p_);
        const DensityCoeffs dc = density_coeffs(a, p_);
        const double c0 = kfac_ * qs[q].w * chi_d1_[qbase + q];
        const double c0j = c0 * j;

        Vec2 pj[3], vj[3];
        for (int jn = 0; jn < 3; ++jn) {
          pj[jn] = ct * eg[jn];
          vj[jn] = dc.cof * pj[jn];
        }
        const Vec2 acol[2] = {a.col(0), a.col(1)};
        const Vec2 dw_qi[3] = {dw * qi[0], dw * qi[1], dw * qi[2]};
        const Vec2 dw_pj[3] = {dw * pj[0], dw * pj[1], dw * pj[2]};
        // u_b = Cof(A) q_i and scalars a_b^T DW q_i
        double adwq[2][3], acofq[2][3];
        for (int b = 0; b < 2; ++b)
          for (int i = 0; i < 3; ++i) {
            adwq[b][i] = acol[b].dot(dw_qi[i]);
            acofq[b][i] = acol[b].dot(dc.cof * qi[i]);
          }

        // next-next
        for (int jn = 0; jn < 3; ++jn) {
          for (int jm = 0; jm < 3; ++jm) {
            const double dotp = pj[jn].dot(pj[jm]);
            const double crossp = pj[jn].cross(pj[jm]);
            for (int aa = 0; aa < 2; ++aa)
              for (int bb = 0; bb < 2; ++bb) {
                double v = dc.s2 * vj[jn][aa] * vj[jm][bb];
                if (aa == bb) v += dc.s1 * dotp;
                else v += (aa == 0 ? dc.s3 : -dc.s3) * crossp;
                add_entry(dof(k, en[jn], aa), dof(k, en[jm], bb), c0j * v);
              }
          }
        }

        // prev-prev
        for (int in = 0; in < 3; ++in) {
          for (int im = 0; im < 3; ++im) {
            const double dotq = qi[in].dot(qi[im]);
            const double crossq = qi[in].cross(qi[im]);
            for (int b = 0; b < 2; ++b)
              for (int b2 = 0; b2 < 2; ++b2) {
                double v = dc.s1 * acol[b].dot(acol[b2]) * dotq +
                           dc.s2 * acofq[b][in] * acofq[b2][im] +
                           dc.s3 * acol[b].cross(acol[b2]) * crossq;
                v += qi[im][b] * adwq[b2][in] + qi[in][b2] * adwq[b][im];
                v -= qi[im][b2] * adwq[b][in] + qi[in][b] * adwq[b2][im];
                v += w * (qi[in][b] * qi[im][b2] - qi[im][b] * qi[in][b2]);
                add_entry(dof(k - 1, tn[in], b), dof(k - 1, tn[im], b2),
                          c0j * v);
              }
          }
        }

        // mixed prev(i,b) x next(jn,aa)
        for (int in = 0; in < 3; ++in) {
          for (int jn = 0; jn < 3; ++jn) {
            const double dotqp = qi[in].dot(pj[jn]);
            const double crossqp = qi[in].cross(pj[jn]);
            for (int b = 0; b < 2; ++b)
              for (int aa = 0; aa < 2; ++aa) {
                double v = qi[in][b] * dw_pj[jn][aa];
                v -= dc.s1 * acol[b][aa] * dotqp +
                     dc.s2 * acofq[b][in] * vj[jn][aa] +
                     dc.s3 * acol[b].cross(aa == 0 ? Vec2{1, 0} : Vec2{0, 1}) *
                         crossqp;
                v -= pj[jn][b] * dw_qi[in][aa];
                const double val = c0j * v;
                add_entry(dof(k - 1, tn[in], b), dof(k, en[jn], aa), val);
                add_entry(dof(k, en[jn], aa), dof(k - 1, tn[in], b), val);
              }
          }
        }
      }
    }
  }

  // regularizers
  const double area = mesh_.triangle_area();
  for (int k = 0; k <= K_; ++k) {
    for (int t = 0; t < nt_; ++t) {
      const Matrix2 g = defs_[k].gradient(t);
      const DensityCoeffs dc = density_coeffs(g, p_);
      const auto tn = mesh_.triangle_nodes(t);
      const auto tg = mesh_.basis_gradients(t);
      const double f = p_.delta3 * area;
      Vec2 cofg[3];
      for (int i = 0; i < 3; ++i) cofg[i] = dc.cof * tg[i];
      for (int in = 0; in < 3; ++in)
        for (int im = 0; im < 3; ++im) {
          const double dotg = tg[in].dot(tg[im]);
          const double crossg = tg[in].cross(tg[im]);
          for (int b = 0; b < 2; ++b)
            for (int b2 = 0; b2 < 2; ++b2) {
              double v = dc.s2 * cofg[in][b] * cofg[im][b2];
              if (b == b2) v += dc.s1 * dotg;
              else v += (b == 0 ? dc.s3 : -dc.s3) * crossg;
              add_entry(dof(k, tn[in], b), dof(k, tn[im], b2), f * v);
            }
        }
    }
  }

  // endpoint penalties (Gauss-Newton; the model Hessian is exact within each
  // element because the smoothed targets are piecewise affine)
  auto penalty_hess = [&](const ScalarField& stgt, const Deformation& phi,
                          int k) {
    const double scale = 2.0 / p_.epsilon;
    for (int t = 0; t < nt_; ++t) {
      const auto nodes = mesh_.triangle_nodes(t);
      const auto qs = quadrature_points(mesh_, t);
      for (int q = 0; q < kQ; ++q) {
        Vec2 yr = qs[q].x;
        for (int i = 0; i < 3; ++i) yr += qs[q].bary[i] * phi.u.node(nodes[i]);
        const Vec2 y = clamp_to_domain(yr);
        const Mesh::Location loc = mesh_.locate(y);
        Vec2 d = stgt.element_gradient(loc.tri);
        if (yr.x != y.x) d.x = 0.0;
        if (yr.y != y.y) d.y = 0.0;
        const double f = scale * qs[q].w;
        for (int i = 0; i < 3; ++i)
          for (int i2 = 0; i2 < 3; ++i2) {
            const double bb = qs[q].bary[i] * qs[q].bary[i2];
            for (int aa = 0; aa < 2; ++aa)
              for (int a2 = 0; a2 < 2; ++a2)
                add_entry(dof(k, nodes[i], aa), dof(k, nodes[i2], a2),
                          f * bb * d[aa] * d[a2]);
          }
      }
    }
  };
  penalty_hess(stgt0_, defs_[0], 0);
  penalty_hess(stgtk_, defs_[K_], K_);

  return hess_;
}

}  // namespace shapeflow
