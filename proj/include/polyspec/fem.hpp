#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <vector>

#include "polyspec/mesh.hpp"

namespace polyspec {

using SparseSym = Eigen::SparseMatrix<double>;

/// Stiffness and mass matrices reduced to the interior (Dirichlet) dofs.
struct DirichletSystem {
  SparseSym stiffness;
  SparseSym mass;
  std::vector<int> interior;     // interior dof -> mesh node
  std::vector<int> node_to_dof;  // mesh node -> interior dof or -1
};

DirichletSystem assemble(const TriMesh& mesh);

struct EigenPair {
  double lambda = 0.0;
  Eigen::VectorXd vec;  // interior dofs, B-normalized
  double residual = 0.0;
};

/// Scatter an interior dof vector onto all mesh nodes (zero on the boundary).
Eigen::VectorXd to_full(const DirichletSystem& sys, const Eigen::VectorXd& interior);
Eigen::VectorXd to_interior(const DirichletSystem& sys, const Eigen::VectorXd& full);

/// Shared sparse Cholesky factorization of the stiffness matrix, reused by
/// the eigensolver and the deflated solves.
class FemSolver {
 public:
  explicit FemSolver(const DirichletSystem& sys);

  const DirichletSystem& system() const { return *sys_; }

  /// Smallest `count` eigenpairs of A x = lambda B x by blocked inverse
  /// iteration with Rayleigh-Ritz extraction. Deterministic (fixed seed).
  std::vector<EigenPair> solve_eigs(int count, double rel_tol = 1e-11,
                                    int max_iter = 400) const;

  /// Plain stiffness solve A x = rhs through the stored factorization.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  /// Solves (A - lambda B) U = rhs with U B-orthogonal to `deflation`
  /// (projected PCG, stiffness preconditioner). rhs must annihilate the
  /// deflation vector.
  Eigen::VectorXd deflated_solve(double lambda, const Eigen::VectorXd& deflation,
                                 const Eigen::VectorXd& rhs, double rel_tol = 1e-12,
                                 int max_iter = 5000) const;

  /// a_h(u, v) = u^T (A - lambda B) v on interior dofs.
  double bilinear(double lambda, const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;

 private:
  const DirichletSystem* sys_;
  Eigen::SimplicialLDLT<SparseSym> chol_;
};

/// Convenience wrappers matching the operation contracts.
std::vector<EigenPair> solve_eigs(const DirichletSystem& sys, int count);

/// Per-coarse-triangle 2x2 tables G_j with G_j(p, q) = int_{T_j} d_p u d_q w.
std::vector<Eigen::Matrix2d> slice_gradient_products(const TriMesh& mesh,
                                                     const Eigen::VectorXd& u_full,
                                                     const Eigen::VectorXd& w_full);

/// Exact integral over the ray S_0 = [0,1] x {0} of u^2 for piecewise-linear
/// u on a symmetric mesh.
double segment_mass(const TriMesh& mesh, const Eigen::VectorXd& u_full);

struct BoundaryEdgeDatum {
  int a, b;       // edge endpoints, ordered along the triangle boundary
  int tri;        // adjacent triangle
  double grad_sq; // |grad u_h|^2 on that triangle
  double length;
  Vec2 outward_normal;
};

/// For u vanishing on the boundary: per boundary edge, the constant
/// |grad u_h|^2 of the adjacent triangle together with the edge geometry.
std::vector<BoundaryEdgeDatum> boundary_energy_per_edge(const TriMesh& mesh,
                                                        const Eigen::VectorXd& u_full);

/// Exact integral of u_h^2 over triangle t.
double tri_mass_sq(const TriMesh& mesh, const Eigen::VectorXd& u_full, int t);

/// Constant gradient of a P1 field on triangle t.
Vec2 tri_grad(const TriMesh& mesh, const Eigen::VectorXd& u_full, int t);

}  // namespace polyspec
