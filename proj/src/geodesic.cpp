#include "shapeflow/geodesic.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "shapeflow/assembly.hpp"
#include "shapeflow/warp.hpp"

namespace shapeflow {

void SolverConfig::validate() const {
  if (!(grad_tol_rel > 0.0) || !(grad_tol_abs > 0.0))
    throw invalid_input("SolverConfig: tolerances must be > 0");
  if (schedule.empty()) throw invalid_input("SolverConfig: empty schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i].first < schedule[i - 1].first ||
        schedule[i].second < schedule[i - 1].second)
      throw invalid_input("SolverConfig: schedule must be non-decreasing");
  }
  for (const auto& [level, k] : schedule) {
    if (level < 1 || level > 12) throw invalid_input("SolverConfig: bad level");
    if (k < 1) throw invalid_input("SolverConfig: bad K");
  }
}

std::vector<std::pair<int, int>> default_schedule(int level_min, int level_max,
                                                  int K) {
  std::vector<std::pair<int, int>> s;
  int k = std::min(2, K);
  while (true) {
    s.emplace_back(level_min, k);
    if (k >= K) break;
    k *= 2;
  }
  for (int level = level_min + 1; level <= level_max; ++level)
    s.emplace_back(level, K);
  return s;
}

void write_history_csv(const std::vector<HistoryRow>& rows,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("write_history_csv: cannot open " + path);
  out << "iter,level,K,total,sum_pair,sum_reg,penalty0,penaltyK,trust_radius,"
         "step_accepted\n";
  out.precision(12);
  for (const HistoryRow& r : rows)
    out << r.iter << ',' << r.level << ',' << r.K << ',' << r.total << ','
        << r.sum_pair << ',' << r.sum_reg << ',' << r.penalty0 << ','
        << r.penaltyK << ',' << r.trust_radius << ',' << r.step_accepted
        << '\n';
}

namespace {

// Steihaug-Toint truncated CG bounded by the trust radius; handles indefinite
// and singular Hessians (the interior rigid-motion gauge modes).
Eigen::VectorXd steihaug_cg(const Eigen::SparseMatrix<double>& h,
                            const Eigen::VectorXd& g, double radius,
                            int max_iter) {
  const int n = g.size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = -g;
  Eigen::VectorXd d = r;
  double r2 = r.squaredNorm();
  const double tol2 = std::max(1e-24, 1e-4 * r2 * 1e-4);  // (1e-4 ||g||)^2

  auto to_boundary = [&](const Eigen::VectorXd& base,
                         const Eigen::VectorXd& dir) {
    const double a = dir.squaredNorm();
    const double b = 2.0 * base.dot(dir);
    const double c = base.squaredNorm() - radius * radius;
    const double disc = std::max(0.0, b * b - 4.0 * a * c);
    const double tau = (-b + std::sqrt(disc)) / (2.0 * a);
    return (base + tau * dir).eval();
  };

  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd hd = h * d;
    const double curv = d.dot(hd);
    if (curv <= 0.0) return to_boundary(x, d);
    const double alpha = r2 / curv;
    const Eigen::VectorXd x_next = x + alpha * d;
    if (x_next.norm() >= radius) return to_boundary(x, d);
    x = x_next;
    r -= alpha * hd;
    const double r2_next = r.squaredNorm();
    if (r2_next <= tol2) break;
    d = r + (r2_next / r2) * d;
    r2 = r2_next;
  }
  return x;
}

struct StageResult {
  bool converged = false;
  bool wants_reset = false;
};

class TrustRegionSolver {
public:
  TrustRegionSolver(PathObjective& obj, const SolverConfig& cfg, int level,
                    int K, std::vector<HistoryRow>& history)
      : obj_(obj), cfg_(cfg), level_(level), K_(K), history_(history) {}

  // Minimizes over z in place. Returns convergence status and whether the
  // reset threshold was crossed (caller re-bases and continues).
  StageResult run(Eigen::VectorXd& z, double reset_threshold) {
    EnergyBreakdown bd;
    double f = obj_.energy(z, &bd);
    if (!std::isfinite(f))
      throw solver_failure("trust region: infeasible initial configuration");
    Eigen::VectorXd g = obj_.gradient(z);
    const double g0 = g.lpNorm<Eigen::Infinity>();
    const double tol = std::max(cfg_.grad_tol_rel * g0, cfg_.grad_tol_abs);

    // configured radii are RMS nodal displacements; the l2 trust region
    // scales with sqrt(#dofs) so the physical step size is level-independent
    const double rms = std::sqrt(static_cast<double>(obj_.dof_count()));
    double radius = cfg_.tr_init * rms;
    const double radius_max = cfg_.tr_max * rms;

    push_row(bd, radius, 1);
    if (g0 <= tol) return {true, false};

    bool analyzed = false;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;

    for (int iter = 1; iter <= cfg_.max_newton_iter; ++iter) {
      const Eigen::SparseMatrix<double>& h = obj_.hessian(z);

      // Newton direction from a positive definite shift of the Hessian: the
      // base shift regularizes the rigid-gauge null space, larger shifts
      // handle indefiniteness away from the minimum (Levenberg style).
      Eigen::VectorXd d;
      bool have_dir = false;
      {
        double diag_scale = 0.0;
        for (int i = 0; i < h.rows(); ++i) diag_scale += std::abs(h.coeff(i, i));
        diag_scale = std::max(1e-300, diag_scale / h.rows());
        Eigen::SparseMatrix<double> hs = h;
        if (!analyzed) {
          // pattern is stage-constant; shift only touches the diagonal
          for (int i = 0; i < hs.rows(); ++i) hs.coeffRef(i, i) += 0.0;
          ldlt.analyzePattern(hs);
          analyzed = true;
        }
        double sigma = 1e-9 * diag_scale;
        for (int attempt = 0; attempt < 12 && !have_dir; ++attempt) {
          hs = h;
          for (int i = 0; i < hs.rows(); ++i) hs.coeffRef(i, i) += sigma;
          ldlt.factorize(hs);
          if (ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0) {
            d = ldlt.solve(-g);
            have_dir = g.dot(d) < 0.0;
          }
          sigma *= 100.0;
        }
      }
      if (have_dir && d.norm() > radius) d *= radius / d.norm();

      double model_dec =
          have_dir ? -(g.dot(d) + 0.5 * d.dot(h * d)) : -1.0;
      if (!(model_dec > 0.0)) {
        // scaled shifted-Newton direction fails the model: true boundary solve
        d = steihaug_cg(h, g, radius, std::min<int>(400, 2 * h.rows()));
        model_dec = -(g.dot(d) + 0.5 * d.dot(h * d));
      }
      if (!(model_dec > 0.0) || !(d.norm() > 0.0)) {
        radius *= 0.25;
        push_row(bd, radius, 0);
        if (radius < 1e-13 * rms) break;
        continue;
      }

      EnergyBreakdown bd_new;
      const double f_new = obj_.energy(z + d, &bd_new);
      const double rho = (f - f_new) / model_dec;
      const bool accept = std::isfinite(f_new) && f_new < f && rho > 0.01;

      if (accept) {
        z += d;
        f = f_new;
        bd = bd_new;
        g = obj_.gradient(z);
        if (rho > 0.75 && d.norm() >= 0.99 * radius)
          radius = std::min(2.0 * radius, radius_max);
        push_row(bd, radius, 1);

        if (max_nodal_displacement(z) > reset_threshold)
          return {g.lpNorm<Eigen::Infinity>() <= tol, true};
        if (g.lpNorm<Eigen::Infinity>() <= tol) return {true, false};
      } else {
        radius = 0.25 * std::min(radius, d.norm());
        push_row(bd, radius, 0);
        if (radius < 1e-13 * rms) break;
      }
    }
    return {g.lpNorm<Eigen::Infinity>() <= tol, false};
  }

private:
  PathObjective& obj_;
  const SolverConfig& cfg_;
  int level_;
  int K_;
  std::vector<HistoryRow>& history_;

  double max_nodal_displacement(const Eigen::VectorXd& z) const {
    double m = 0.0;
    const int bd = obj_.block_dim();
    for (int k = 0; k <= obj_.steps(); ++k)
      for (int v = 0; v < bd / 2; ++v) {
        const double x = z[k * bd + 2 * v];
        const double y = z[k * bd + 2 * v + 1];
        m = std::max(m, std::sqrt(x * x + y * y));
      }
    return m;
  }

  void push_row(const EnergyBreakdown& bd, double radius, int accepted) {
    HistoryRow row;
    row.iter = history_.empty() ? 0 : history_.back().iter + 1;
    row.level = level_;
    row.K = K_;
    row.total = bd.total;
    row.sum_pair = K_ * bd.pair_sum();
    row.sum_reg = bd.reg_sum();
    row.penalty0 = bd.penalty0;
    row.penaltyK = bd.penaltyK;
    row.trust_radius = radius;
    row.step_accepted = accepted;
    history_.push_back(row);
  }
};

Deformation identity_deformation(const Mesh& mesh) { return Deformation(mesh); }

}  // namespace

DiscretePath refine_time(const DiscretePath& path) {
  DiscretePath out;
  out.K = 2 * path.K;
  out.mesh = path.mesh;
  out.refs.resize(out.K + 1);
  out.matchings.resize(out.K);
  out.defs.resize(out.K + 1);

  for (int k = 0; k <= path.K; ++k) {
    out.refs[2 * k] = path.refs[k];
    out.defs[2 * k] = path.defs[k];
  }
  for (int k = 1; k <= path.K; ++k) {
    out.refs[2 * k - 1] = path.refs[k - 1];
    out.matchings[2 * k - 2] = identity_deformation(path.mesh);  // ref duplicate
    out.matchings[2 * k - 1] = path.matchings[k - 1];

    // midpoint over the left reference: average of phi_{k-1} and
    // phi_k o psi-hat_k at the nodes
    Deformation mid(path.mesh);
    const Mesh& mesh = path.mesh;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      const Vec2 x = mesh.vertex_position(v);
      const Vec2 left = path.defs[k - 1].apply_node(v);
      const Vec2 through =
          path.defs[k].apply(clamp_to_domain(path.matchings[k - 1].apply_node(v)));
      mid.u.set_node(v, 0.5 * (left + through) - x);
    }
    out.defs[2 * k - 1] = mid;
  }
  return out;
}

DiscretePath prolongate_path(const DiscretePath& path) {
  DiscretePath out;
  out.K = path.K;
  out.mesh = make_mesh(path.mesh.level + 1);
  for (const auto& r : path.refs) out.refs.push_back(prolongate(r));
  for (const auto& m : path.matchings) out.matchings.push_back(prolongate(m));
  for (const auto& d : path.defs) out.defs.push_back(prolongate(d));
  return out;
}

DiscretePath rebase_references(const DiscretePath& path) {
  DiscretePath out;
  out.K = path.K;
  out.mesh = path.mesh;
  out.refs.resize(path.K + 1);
  out.matchings.resize(path.K);
  out.defs.assign(path.K + 1, Deformation(path.mesh));

  for (int k = 0; k <= path.K; ++k)
    out.refs[k] = push_forward_mask(path.refs[k], path.defs[k],
                                    /*check_orientation=*/false);

  const Mesh& mesh = path.mesh;
  for (int k = 1; k <= path.K; ++k) {
    // composed matching phi_k o psi-hat_k o phi_{k-1}^{-1}, nodally resampled
    const Deformation inv_prev = invert_deformation(path.defs[k - 1]);
    Deformation composed(mesh);
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      const Vec2 x = mesh.vertex_position(v);
      const Vec2 p = clamp_to_domain(inv_prev.apply_node(v));
      const Vec2 m = clamp_to_domain(path.matchings[k - 1].apply(p));
      composed.u.set_node(v, path.defs[k].apply(m) - x);
    }
    out.matchings[k - 1] = composed;
  }
  return out;
}

GeodesicResult minimize_path(const ShapeMask& source, const ShapeMask& target,
                             const SolverConfig& cfg, const MaterialParams& p) {
  cfg.validate();
  p.validate();
  source.validate();
  target.validate();
  if (source.mesh().level != target.mesh().level)
    throw invalid_input("minimize_path: endpoint level mismatch");
  if (source.empty() || target.empty())
    throw invalid_input("minimize_path: empty endpoint mask");
  const int finest = cfg.schedule.back().first;
  if (finest > source.mesh().level)
    throw invalid_input("minimize_path: schedule finer than the input masks");

  GeodesicResult result;
  DiscretePath path;
  bool initialized = false;

  for (const auto& [level, K] : cfg.schedule) {
    if (!initialized) {
      path = DiscretePath::identity(restrict_to_level(source, level), K);
      initialized = true;
    } else {
      while (path.mesh.level < level) path = prolongate_path(path);
      while (path.K < K) {
        if (2 * path.K > K)
          throw invalid_input("minimize_path: schedule K must refine by doubling");
        path = refine_time(path);
      }
      if (path.K != K)
        throw invalid_input("minimize_path: schedule K must refine by doubling");
    }

    MaterialParams p_stage = p;
    if (cfg.delta2_tracks_h) p_stage.delta2 = path.mesh.h;
    const ShapeMask src_l = restrict_to_level(source, level);
    const ShapeMask tgt_l = restrict_to_level(target, level);

    bool stage_converged = false;
    double reset_threshold = cfg.reset_threshold;
    for (int pass = 0; pass <= cfg.max_resets_per_stage; ++pass) {
      PathObjective obj(path, src_l, tgt_l, p_stage);
      Eigen::VectorXd z = obj.pack(path.defs);
      TrustRegionSolver solver(obj, cfg, level, K, result.history);
      const StageResult sr = solver.run(z, reset_threshold);
      path.defs = obj.unpack(z);
      if (sr.wants_reset && pass < cfg.max_resets_per_stage) {
        DiscretePath rebased = rebase_references(path);
        if (std::isfinite(total_energy(rebased, src_l, tgt_l, p_stage).total)) {
          path = std::move(rebased);
        } else {
          // nodal resampling of a near-degenerate composition folded; keep
          // optimizing and re-base later from a less extreme iterate
          reset_threshold *= 2.0;
        }
        continue;
      }
      stage_converged = sr.converged;
      break;
    }

    const bool final_stage = (level == cfg.schedule.back().first &&
                              K == cfg.schedule.back().second);
    if (final_stage) {
      PathObjective obj(path, src_l, tgt_l, p_stage);
      obj.energy(obj.pack(path.defs), &result.energy);
      if (!stage_converged) {
        result.path = std::move(path);
        throw geodesic_failure(
            "minimize_path: Newton trust region did not reach the gradient "
            "tolerance at level " +
                std::to_string(level) + ", K=" + std::to_string(K),
            std::move(result));
      }
    }
  }

  result.path = std::move(path);
  return result;
}

}  // namespace shapeflow
