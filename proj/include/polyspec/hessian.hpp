#pragma once

#include <utility>
#include <vector>

#include "polyspec/fem.hpp"
#include "polyspec/geometry.hpp"
#include "polyspec/mesh.hpp"

namespace polyspec {

/// Exact gradient of the discrete first eigenvalue with respect to vertex
/// coordinates, assembled in distributed form sum_T int_T S1 grad(phi_i)
/// with S1 = (|grad u|^2 - lambda u^2) Id - 2 grad(u) (x) grad(u). This is
/// the derivative of lambda_h under the mesh morph carried by the hats.
Eigen::VectorXd eig_gradient(const TriMesh& mesh, const Eigen::VectorXd& u_full,
                             double lambda);

/// Boundary-expression variant -sum_edges int |grad u|^2 phi_i n; agrees with
/// the distributed form up to discretization consistency, kept as a
/// diagnostic cross-check.
Eigen::VectorXd eig_gradient_boundary(const TriMesh& mesh, const Eigen::VectorXd& u_full);

/// Gradient of J = |P| lambda_1(P).
Eigen::VectorXd j_gradient(const Polygon& p, const TriMesh& mesh,
                           const Eigen::VectorXd& u_full, double lambda);

/// -4 [ int_{T_0} (d_x u)^2 - cot(theta) int_{T_0} d_x u d_y u ]; equals
/// -2 lambda_h / n on symmetric meshes.
double s1_lambda(const TriMesh& mesh, const Eigen::VectorXd& u_full);

struct MaterialSolution {
  Eigen::VectorXd u_full;      // first eigenfunction on all nodes
  Eigen::VectorXd U1_full;     // first component of U_0
  Eigen::VectorXd U2_full;     // second component of U_0
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double s1h = 0.0;
};

/// Right-hand sides (f^1, f^2) of the vertex-0 material-derivative problem on
/// a symmetric mesh, as interior load vectors. Checks that both components
/// annihilate the discrete eigenfunction.
std::pair<Eigen::VectorXd, Eigen::VectorXd> material_rhs(const TriMesh& mesh,
                                                         const DirichletSystem& sys,
                                                         const Eigen::VectorXd& u_full,
                                                         double s1h);

/// Solves the two deflated systems for U_0 = (U_0^1, U_0^2).
MaterialSolution solve_U0(const FemSolver& solver, const TriMesh& mesh,
                          const EigenPair& e1, const EigenPair& e2);

/// Maximal deviation from the expected parity of (U_0^1, U_0^2) under the
/// mesh reflection (component 1 even in y, component 2 odd).
double parity_defect(const TriMesh& mesh, const MaterialSolution& u0);

struct Coefficients {
  double alpha = 0.0, beta = 0.0;
  double gamma1 = 0.0, gamma2 = 0.0;  // the two formulas for gamma_k
  double gamma_gap = 0.0;
  double alpha_check = 0.0, beta_check = 0.0;  // slice-integral route
};

/// (alpha_k, beta_k, gamma_k) of the 2x2 circulant block B_{rho_k}, computed
/// through the bilinear form a_h against the symmetry-permuted combinations
/// of U_0 and cross-checked against the slice-integral expansion.
Coefficients coefficients(const TriMesh& mesh, const FemSolver& solver,
                          const MaterialSolution& u0, int k);

struct HessianSpectrum {
  int n = 0, m = 0;
  double lambda1 = 0.0, lambda2 = 0.0;
  double axx = 0.0, ayy = 0.0, axy = 0.0;  // slice-0 gradient products of u_1
  double s1h = 0.0;
  std::vector<Coefficients> coeffs;  // per k = 0..n-1
  std::vector<double> mu;            // 2n values, ascending
  int zero_count = 0;                // |mu| <= 1e-4 max|mu|
  /// Distinct nonzero eigenvalues with multiplicities, ascending.
  std::vector<std::pair<double, int>> distinct_nonzero;
};

HessianSpectrum hessian_spectrum(int n, int m);

/// Same pipeline on an already built symmetric mesh (reused by the CLI and
/// the certification driver).
HessianSpectrum hessian_spectrum(const TriMesh& mesh, const FemSolver& solver,
                                 const MaterialSolution& u0);

/// Full 2n x 2n Hessian of J = |P| lambda_1(P) at any simple polygon, with
/// the hat functions carried by the mesh (center fan on symmetric meshes,
/// ear-clip fan otherwise). All 2n material solutions are solved individually.
Eigen::MatrixXd hessian_blocks_direct(const Polygon& p, const TriMesh& mesh);

/// Eigenvalues mu_{2k}, mu_{2k+1} of the Hermitian block [[a, i g], [-i g, b]].
std::pair<double, double> block_eigenvalues(double a, double b, double g);

}  // namespace polyspec
