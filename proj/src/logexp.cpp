#include "shapeflow/logexp.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "shapeflow/quadrature.hpp"
#include "shapeflow/scattered.hpp"
#include "shapeflow/vfld_io.hpp"
#include "shapeflow/image_io.hpp"
#include "shapeflow/warp.hpp"

namespace shapeflow {

void ShapeVariation::validate() const {
  base.validate();
  if (zeta.mesh.level != base.mesh().level)
    throw invalid_input("ShapeVariation: field level mismatch");
  for (std::size_t i = 0; i < zeta.x.size(); ++i)
    if (!std::isfinite(zeta.x[i]) || !std::isfinite(zeta.y[i]))
      throw invalid_input("ShapeVariation: non-finite displacement");
}

double variation_sup_norm(const ShapeVariation& v) {
  double sup = 0.0;
  for (int i = 0; i < v.base.mesh().vertex_count(); ++i)
    if (v.base.chi.v[i] >= 0.5) sup = std::max(sup, v.zeta.node(i).norm());
  return sup;
}

namespace {

SolverConfig log_config(const SolverConfig& cfg, int level, int K) {
  SolverConfig out = cfg;
  if (out.schedule.empty()) {
    out.schedule = default_schedule(std::max(3, level - 2), level, K);
  } else if (out.schedule.back().second != K ||
             out.schedule.back().first != level) {
    throw invalid_input("shape_log: schedule must end at the requested (level, K)");
  }
  return out;
}

}  // namespace

ShapeVariation shape_log(const ShapeMask& source, const ShapeMask& target,
                         int K, const SolverConfig& cfg,
                         const MaterialParams& p) {
  const int level = source.mesh().level;
  const GeodesicResult r =
      minimize_path(source, target, log_config(cfg, level, K), p);
  const DiscretePath& path = r.path;
  const Mesh& mesh = path.mesh;

  // zeta_1 = psi_1 - id with psi_1 = phi_1 o matching_1 o phi_0^{-1}, sampled
  // at the deformed base points phi_0(node) and resampled by MLS
  std::vector<Vec2> pts(mesh.vertex_count());
  std::vector<Vec2> vals(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 b = path.defs[0].apply_node(v);
    const Vec2 mid = clamp_to_domain(path.matchings[0].apply_node(v));
    const Vec2 d = path.defs[1].apply(mid) - b;
    pts[v] = b;
    vals[v] = d;
  }
  const ScatteredField scattered(std::move(pts), std::move(vals));

  ShapeVariation out;
  out.base = source;
  out.zeta = scattered.resample(source.mesh());
  return out;
}

ShapeMask shape_exp1(const ShapeVariation& v) {
  v.validate();
  Deformation phi(v.base.mesh());
  phi.u = v.zeta;
  return push_forward_mask(v.base, phi);
}

namespace {

constexpr int kQ = 7;

// Weak-form residual solve for the Exp2 continuation deformation. The
// unknown is the displacement w of psi2 = id + w; for every finite element
// test deformation theta the residual
//   int chi^d1 [ DW(Z):grad(theta)
//                - detZ DW(A) : (A grad(theta) Zinv)
//                + detZ W(A) tr(Zinv grad(theta)) ]   = 0
// must vanish, where Z = 1 + grad(zeta) and A = grad(psi2) evaluated at the
// (id+zeta)-image of the quadrature point.
class Exp2System {
public:
  Exp2System(const ShapeMask& base, const VectorField2& zeta,
             const MaterialParams& p)
      : mesh_(base.mesh()), nv_(mesh_.vertex_count()),
        nt_(mesh_.triangle_count()), p_(p) {
    Deformation dz(mesh_);
    dz.u = zeta;

    chi_.resize(static_cast<std::size_t>(nt_) * kQ);
    elem_.resize(static_cast<std::size_t>(nt_) * kQ);
    zmat_.resize(nt_);
    r0_ = Eigen::VectorXd::Zero(2 * nv_);

    double cx = 0.0, cy = 0.0, cmass = 0.0;
    for (int t = 0; t < nt_; ++t) {
      const Matrix2 z = dz.gradient(t);
      zmat_[t] = z;
      const auto nodes = mesh_.triangle_nodes(t);
      const auto tg = mesh_.basis_gradients(t);
      const auto qs = quadrature_points(mesh_, t);
      const double detz = z.det();
      for (int q = 0; q < kQ; ++q) {
        const std::size_t idx = static_cast<std::size_t>(t) * kQ + q;
        double chi = 0.0;
        Vec2 y = qs[q].x;
        for (int i = 0; i < 3; ++i) {
          chi += qs[q].bary[i] * base.chi.v[nodes[i]];
          y += qs[q].bary[i] * zeta.node(nodes[i]);
        }
        const double chi_d1 = (1.0 - p_.delta1) * chi + p_.delta1;
        chi_[idx] = chi_d1;
        if (chi >= 0.25 && detz <= 0.0)
          throw step_too_large("exp2: variation folds an element on the shape");
        y = clamp_to_domain(y);
        elem_[idx] = mesh_.locate(y).tri;
        cx += chi_d1 * qs[q].w * y.x;
        cy += chi_d1 * qs[q].w * y.y;
        cmass += chi_d1 * qs[q].w;

        // constant residual part DW(Z):grad(theta)
        if (detz > 0.0) {
          const Matrix2 dwz = energy_density_gradient(z, p_);
          for (int j = 0; j < 3; ++j) {
            const Vec2 r = dwz * tg[j];
            r0_[2 * nodes[j]] += qs[q].w * chi_d1 * r.x;
            r0_[2 * nodes[j] + 1] += qs[q].w * chi_d1 * r.y;
          }
        }
      }
    }
    centroid_ = Vec2{cx / cmass, cy / cmass};

    build_constraints(dz);
    build_pattern();
  }

  int dim() const { return 2 * nv_ + 3; }

  Eigen::VectorXd residual(const VectorField2& w) const {
    Eigen::VectorXd r = r0_;
    Deformation psi(mesh_);
    psi.u = w;
    for (int t = 0; t < nt_; ++t) {
      const Matrix2 z = zmat_[t];
      const double detz = z.det();
      const Matrix2 zinv_t = z.inverse().transposed();
      const auto nodes = mesh_.triangle_nodes(t);
      const auto tg = mesh_.basis_gradients(t);
      const auto qs = quadrature_points(mesh_, t);
      for (int q = 0; q < kQ; ++q) {
        const std::size_t idx = static_cast<std::size_t>(t) * kQ + q;
        const Matrix2 a = psi.gradient(elem_[idx]);
        if (a.det() <= 0.0)
          throw step_too_large("exp2: continuation deformation folded");
        const double wval = energy_density(a, p_);
        const Matrix2 dwa = energy_density_gradient(a, p_);
        const Matrix2 at_dw = a.transposed() * dwa;
        const double c = qs[q].w * chi_[idx] * detz;
        for (int j = 0; j < 3; ++j) {
          const Vec2 rho = zinv_t * tg[j];
          const Vec2 term = at_dw * rho * -1.0 + wval * rho;
          r[2 * nodes[j]] += c * term.x;
          r[2 * nodes[j] + 1] += c * term.y;
        }
      }
    }
    return r;
  }

  // Jacobian of the residual plus the gauge constraint border.
  const Eigen::SparseMatrix<double>& jacobian(const VectorField2& w) {
    std::fill(jac_.valuePtr(), jac_.valuePtr() + jac_.nonZeros(), 0.0);
    Deformation psi(mesh_);
    psi.u = w;
    for (int t = 0; t < nt_; ++t) {
      const Matrix2 z = zmat_[t];
      const double detz = z.det();
      const Matrix2 zinv_t = z.inverse().transposed();
      const auto nodes = mesh_.triangle_nodes(t);
      const auto tg = mesh_.basis_gradients(t);
      const auto qs = quadrature_points(mesh_, t);
      for (int q = 0; q < kQ; ++q) {
        const std::size_t idx = static_cast<std::size_t>(t) * kQ + q;
        const int e = elem_[idx];
        const auto en = mesh_.triangle_nodes(e);
        const auto eg = mesh_.basis_gradients(e);
        const Matrix2 a = psi.gradient(e);
        const Matrix2 dwa = energy_density_gradient(a, p_);
        const DensityCoeffs dc = density_coeffs(a, p_);
        const Vec2 acol[2] = {a.col(0), a.col(1)};
        const double c = qs[q].w * chi_[idx] * detz;

        for (int j = 0; j < 3; ++j) {
          const Vec2 rho = zinv_t * tg[j];
          const Vec2 cof_rho = dc.cof * rho;
          const Vec2 dw_rho = dwa * rho;
          for (int i = 0; i < 3; ++i) {
            const Vec2 gi = eg[i];
            const Vec2 cof_gi = dc.cof * gi;
            const Vec2 dw_gi = dwa * gi;
            const double dot_grho = gi.dot(rho);
            const double cross_grho = gi.cross(rho);
            for (int aa = 0; aa < 2; ++aa) {
              for (int b = 0; b < 2; ++b) {
                // - detZ [ D2W(e_b x g_i, acol_aa x rho_j)
                //          + g_i[aa] (DW rho_j)[b] ]
                // + detZ rho_j[aa] (DW g_i)[b]
                double d2 = dc.s1 * acol[aa][b] * dot_grho +
                            dc.s2 * cof_gi[b] * acol[aa].dot(cof_rho);
                const double cross_e_acol = b == 0 ? acol[aa].y : -acol[aa].x;
                d2 += dc.s3 * cross_e_acol * cross_grho;
                double v = -(d2 + gi[aa] * dw_rho[b]);
                v += rho[aa] * dw_gi[b];
                add_entry(2 * nodes[j] + aa, 2 * en[i] + b, c * v);
              }
            }
          }
        }
      }
    }
    // constraint border
    for (int r = 0; r < 3; ++r)
      for (const auto& [col, val] : constraints_[r]) {
        add_entry(2 * nv_ + r, col, val);
        add_entry(col, 2 * nv_ + r, val);
      }
    return jac_;
  }

private:
  Mesh mesh_;
  int nv_, nt_;
  MaterialParams p_;
  std::vector<double> chi_;
  std::vector<int> elem_;
  std::vector<Matrix2> zmat_;
  Eigen::VectorXd r0_;
  Vec2 centroid_;
  std::vector<std::vector<std::pair<int, double>>> constraints_;
  Eigen::SparseMatrix<double> jac_;

  void build_constraints(const Deformation& dz) {
    // zero weighted mean displacement (2) and zero weighted mean rotation (1)
    // of the Newton update, accumulated at the shifted quadrature points
    std::vector<double> tx(2 * nv_, 0.0), ty(2 * nv_, 0.0), rot(2 * nv_, 0.0);
    for (int t = 0; t < nt_; ++t) {
      const auto qs = quadrature_points(mesh_, t);
      const auto nodes = mesh_.triangle_nodes(t);
      for (int q = 0; q < kQ; ++q) {
        const std::size_t idx = static_cast<std::size_t>(t) * kQ + q;
        Vec2 y = qs[q].x;
        for (int i = 0; i < 3; ++i) y += qs[q].bary[i] * dz.u.node(nodes[i]);
        y = clamp_to_domain(y);
        const Mesh::Location loc = mesh_.locate(y);
        const auto ln = mesh_.triangle_nodes(loc.tri);
        const double c = chi_[idx] * qs[q].w;
        const Vec2 arm = y - centroid_;
        for (int i = 0; i < 3; ++i) {
          const double lam = c * loc.bary[i];
          tx[2 * ln[i]] += lam;
          ty[2 * ln[i] + 1] += lam;
          rot[2 * ln[i]] -= lam * arm.y;
          rot[2 * ln[i] + 1] += lam * arm.x;
        }
      }
    }
    constraints_.assign(3, {});
    auto compress = [&](const std::vector<double>& row, int r) {
      for (int i = 0; i < 2 * nv_; ++i)
        if (row[i] != 0.0) constraints_[r].push_back({i, row[i]});
    };
    compress(tx, 0);
    compress(ty, 1);
    compress(rot, 2);
  }

  void build_pattern() {
    std::vector<Eigen::Triplet<double>> trips;
    for (int t = 0; t < nt_; ++t) {
      const auto nodes = mesh_.triangle_nodes(t);
      for (int q = 0; q < kQ; ++q) {
        const int e = elem_[static_cast<std::size_t>(t) * kQ + q];
        const auto en = mesh_.triangle_nodes(e);
        for (int j = 0; j < 3; ++j)
          for (int i = 0; i < 3; ++i)
            for (int aa = 0; aa < 2; ++aa)
              for (int b = 0; b < 2; ++b)
                trips.emplace_back(2 * nodes[j] + aa, 2 * en[i] + b, 0.0);
      }
    }
    for (int r = 0; r < 3; ++r)
      for (const auto& [col, val] : constraints_[r]) {
        (void)val;
        trips.emplace_back(2 * nv_ + r, col, 0.0);
        trips.emplace_back(col, 2 * nv_ + r, 0.0);
      }
    // keep the diagonal present so the LU factorization never sees an
    // empty pivot column in the border block
    for (int i = 0; i < dim(); ++i) trips.emplace_back(i, i, 0.0);
    jac_.resize(dim(), dim());
    jac_.setFromTriplets(trips.begin(), trips.end());
    jac_.makeCompressed();
  }

  void add_entry(int r, int c, double v) {
    const int* outer = jac_.outerIndexPtr();
    const int* inner = jac_.innerIndexPtr();
    double* vals = jac_.valuePtr();
    const int* lo = inner + outer[c];
    const int* hi = inner + outer[c + 1];
    const int* it = std::lower_bound(lo, hi, r);
    vals[it - inner] += v;
  }
};

VectorField2 solve_exp2_level(const ShapeMask& base, const VectorField2& zeta,
                              const VectorField2& w_init,
                              const MaterialParams& p) {
  Exp2System system(base, zeta, p);
  VectorField2 w = w_init;

  Eigen::VectorXd r = system.residual(w);
  const double r0 = r.lpNorm<Eigen::Infinity>();
  const double tol = std::max(1e-13, 1e-10 * r0);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;

  for (int iter = 0; iter < 60; ++iter) {
    if (r.lpNorm<Eigen::Infinity>() <= tol) return w;
    const Eigen::SparseMatrix<double>& jac = system.jacobian(w);
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success)
      throw step_too_large("exp2: singular Newton system");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(system.dim());
    rhs.head(r.size()) = -r;
    const Eigen::VectorXd delta = lu.solve(rhs);

    // damped step on the residual norm
    const double rnorm = r.norm();
    double alpha = 1.0;
    for (;;) {
      VectorField2 w_next = w;
      for (int v = 0; v < static_cast<int>(w.x.size()); ++v) {
        w_next.x[v] += alpha * delta[2 * v];
        w_next.y[v] += alpha * delta[2 * v + 1];
      }
      bool ok = true;
      Eigen::VectorXd r_next;
      try {
        r_next = system.residual(w_next);
      } catch (const step_too_large&) {
        ok = false;
      }
      if (ok && r_next.norm() <= rnorm * (1.0 - 1e-4 * alpha)) {
        w = std::move(w_next);
        r = std::move(r_next);
        break;
      }
      alpha *= 0.5;
      if (alpha < 1e-4)
        throw step_too_large("exp2: Newton line search stalled");
    }
  }
  throw step_too_large("exp2: Newton did not converge");
}

}  // namespace

Exp2Result shape_exp2_detailed(const ShapeVariation& v, const SolverConfig& cfg,
                               const MaterialParams& p) {
  v.validate();
  p.validate();
  const Mesh& mesh = v.base.mesh();
  const int level = mesh.level;

  if (variation_sup_norm(v) > 4.0 * mesh.h)
    throw step_too_large("exp2: variation exceeds the smallness guard (4h)");

  // coarse-to-fine: each level's solution initializes the next
  const int level0 = std::min(level, std::max(3, level - 2));
  VectorField2 w;
  for (int l = level0; l <= level; ++l) {
    const ShapeMask base_l = restrict_to_level(v.base, l);
    VectorField2 zeta_l = restrict_to_level(v.zeta, l);
    MaterialParams p_l = p;
    if (cfg.delta2_tracks_h) p_l.delta2 = make_mesh(l).h;
    const VectorField2 w_init = (l == level0) ? zeta_l : w;
    w = solve_exp2_level(base_l, zeta_l, w_init, p_l);
    if (l < level) w = prolongate(w);
  }

  Exp2Result out;
  out.psi2 = Deformation(mesh);
  out.psi2.u = w;

  // full map x -> psi2(clamp(x + zeta(x)))
  Deformation full(mesh);
  for (int node = 0; node < mesh.vertex_count(); ++node) {
    const Vec2 x = mesh.vertex_position(node);
    const Vec2 m = clamp_to_domain(x + v.zeta.node(node));
    full.u.set_node(node, out.psi2.apply(m) - x);
  }
  out.full_map = full;
  out.shape = push_forward_mask(v.base, full);
  return out;
}

ShapeMask shape_exp2(const ShapeVariation& v, const SolverConfig& cfg,
                     const MaterialParams& p) {
  return shape_exp2_detailed(v, cfg, p).shape;
}

ExpFlowResult shape_exp_flow(const ShapeVariation& v, int k,
                             const SolverConfig& cfg, const MaterialParams& p) {
  if (k < 1) throw invalid_input("shape_exp_flow: k must be >= 1");
  v.validate();

  ExpFlowResult out;
  ShapeMask prev2 = v.base;           // O_{j-2}
  ShapeMask prev1 = shape_exp1(v);    // O_{j-1}
  {
    Deformation step(v.base.mesh());
    step.u = v.zeta;
    out.step_maps.push_back(step);
  }
  out.shapes.push_back(prev1);

  VectorField2 zeta = v.zeta;
  for (int j = 2; j <= k; ++j) {
    try {
      if (j > 2) {
        SolverConfig log_cfg = cfg;
        log_cfg.schedule.clear();
        zeta = shape_log(prev2, prev1, 1, log_cfg, p).zeta;
      }
      ShapeVariation step_var{prev2, zeta};
      const Exp2Result e = shape_exp2_detailed(step_var, cfg, p);
      out.shapes.push_back(e.shape);
      out.step_maps.push_back(e.psi2);
      prev2 = prev1;
      prev1 = e.shape;
    } catch (const solver_failure& err) {
      throw step_too_large("shape_exp_flow: step " + std::to_string(j) +
                           " failed: " + err.what());
    }
  }
  return out;
}

std::vector<ShapeMask> shape_exp(const ShapeVariation& v, int k,
                                 const SolverConfig& cfg,
                                 const MaterialParams& p) {
  return shape_exp_flow(v, k, cfg, p).shapes;
}

void save_variation(const ShapeVariation& v, const std::string& manifest_path) {
  namespace fs = std::filesystem;
  const fs::path manifest(manifest_path);
  const fs::path dir = manifest.parent_path();
  const std::string stem = manifest.stem().string();

  const fs::path field_path = dir / (stem + ".vfld");
  const fs::path mask_path = dir / (stem + "_base.pgm");
  save_vfld(v.zeta, field_path.string());
  save_mask(v.base, mask_path.string());

  nlohmann::json j;
  j["field"] = field_path.filename().string();
  j["base_mask"] = mask_path.filename().string();
  j["level"] = v.base.mesh().level;
  std::ofstream out(manifest_path);
  if (!out) throw io_error("save_variation: cannot open " + manifest_path);
  out << j.dump(2) << "\n";
}

ShapeVariation load_variation(const std::string& manifest_path) {
  namespace fs = std::filesystem;
  std::ifstream in(manifest_path);
  if (!in) throw io_error("load_variation: cannot open " + manifest_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw io_error("load_variation: bad manifest: " + std::string(e.what()));
  }
  const fs::path dir = fs::path(manifest_path).parent_path();
  ShapeVariation v;
  const int level = j.at("level").get<int>();
  v.zeta = load_vfld_vector((dir / j.at("field").get<std::string>()).string());
  v.base = load_mask((dir / j.at("base_mask").get<std::string>()).string(), level);
  v.validate();
  return v;
}

}  // namespace shapeflow
