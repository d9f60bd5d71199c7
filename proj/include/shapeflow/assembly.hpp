#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "shapeflow/path_energy.hpp"

namespace shapeflow {

// Assembles the total path energy, its exact gradient, and its exact Hessian
// over the nodal values of all parameterizing deformations. Reference shapes,
// reference matchings, and the endpoint data are frozen at construction (they
// change only on a reference reset, which rebuilds the objective); the
// quadrature-point caches and the Hessian sparsity pattern are therefore
// stage constants.
//
// Unknown layout: dof(k, node, comp) = k*2*nv + 2*node + comp. The Hessian is
// block tridiagonal in k: the energy couples only adjacent deformations.
class PathObjective {
public:
  PathObjective(const DiscretePath& path, const ShapeMask& source,
                const ShapeMask& target, const MaterialParams& p);

  int dof_count() const { return (K_ + 1) * 2 * nv_; }
  int block_dim() const { return 2 * nv_; }
  int steps() const { return K_; }

  Eigen::VectorXd pack(const std::vector<Deformation>& defs) const;
  std::vector<Deformation> unpack(const Eigen::VectorXd& z) const;

  double energy(const Eigen::VectorXd& z, EnergyBreakdown* out = nullptr) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& z) const;

  // Re-assembles into the fixed pattern and returns a reference valid until
  // the next call.
  const Eigen::SparseMatrix<double>& hessian(const Eigen::VectorXd& z);
  const Eigen::SparseMatrix<double>& hessian_matrix() const { return hess_; }

private:
  Mesh mesh_;
  int K_ = 0;
  int nv_ = 0;
  int nt_ = 0;
  MaterialParams p_;
  double kfac_ = 1.0;  // 1/tau = K, applied to the pair terms only

  std::vector<Deformation> matchings_;
  std::vector<Matrix2> mat_p_;      // [k-1][t]: matching gradient per element
  std::vector<double> chi_d1_;      // [k-1][t*7+q]
  std::vector<int> next_elem_;      // [k-1][t*7+q]
  std::vector<double> sref0_, srefk_;  // smoothed reference values per (t,q)
  ScalarField stgt0_, stgtk_;          // smoothed endpoint targets

  Eigen::SparseMatrix<double> hess_;

  mutable std::vector<Deformation> defs_;  // scratch for unpacking
  mutable std::vector<double> b00_, b01_, b10_, b11_, bco_, bw_;
  mutable std::vector<double> g00_, g01_, g10_, g11_;

  int dof(int k, int node, int comp) const {
    return k * 2 * nv_ + 2 * node + comp;
  }

  void unpack_into(const Eigen::VectorXd& z) const;
  void build_caches(const std::vector<ShapeMask>& refs, const ShapeMask& source,
                    const ShapeMask& target);
  void build_pattern();
  void add_entry(int r, int c, double v);
};

}  // namespace shapeflow
