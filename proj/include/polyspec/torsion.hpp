#pragma once

#include "polyspec/fem.hpp"
#include "polyspec/geometry.hpp"
#include "polyspec/mesh.hpp"

namespace polyspec {

struct TorsionState {
  Eigen::VectorXd w_full;  // torsion function on all nodes
  double torsion = 0.0;    // T = int w
  double min_interior = 0.0;  // smallest interior nodal value (maximum principle check)
};

/// Solves -Delta w = 1 with Dirichlet conditions and integrates w.
TorsionState solve_torsion(const TriMesh& mesh);

/// Gradient of T with respect to vertex coordinates via the distributed form
/// with S1^D = (-1/2 |grad w|^2 + w) Id + grad w (x) grad w.
Eigen::VectorXd torsion_gradient(const TriMesh& mesh, const Eigen::VectorXd& w_full);

/// 2n x 2n Hessian of the torsional rigidity with respect to vertex
/// coordinates; plain coercive solves, no deflation.
Eigen::MatrixXd torsion_hessian(const Polygon& p, const TriMesh& mesh);

/// Hessian of the scale-invariant functional -T(P) / |P|^2 (the descent
/// direction of the polygonal Saint-Venant problem).
Eigen::MatrixXd torsion_objective_hessian(const Polygon& p, const TriMesh& mesh);

}  // namespace polyspec
