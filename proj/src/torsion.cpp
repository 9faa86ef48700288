#include "polyspec/torsion.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace polyspec {

namespace {

Eigen::VectorXd unit_load(const TriMesh& mesh, const DirichletSystem& sys) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(sys.interior.size());
  for (int t = 0; t < mesh.num_tris(); ++t) {
    double third = mesh.tri_area(t) / 3.0;
    for (int q = 0; q < 3; ++q) {
      int dof = sys.node_to_dof[mesh.tris[t][q]];
      if (dof >= 0) b[dof] += third;
    }
  }
  return b;
}

Vec2 elem_hat_grad(const TriMesh& mesh, int t, int local) {
  const auto& tr = mesh.tris[t];
  Vec2 p0 = mesh.nodes[tr[0]], p1 = mesh.nodes[tr[1]], p2 = mesh.nodes[tr[2]];
  Vec2 e;
  switch (local) {
    case 0: e = p2 - p1; break;
    case 1: e = p0 - p2; break;
    default: e = p1 - p0; break;
  }
  return Vec2(-e.y(), e.x()) / (2.0 * mesh.tri_area(t));
}

}  // namespace

TorsionState solve_torsion(const TriMesh& mesh) {
  DirichletSystem sys = assemble(mesh);
  FemSolver solver(sys);
  Eigen::VectorXd b = unit_load(mesh, sys);
  Eigen::VectorXd w = solver.solve(b);
  TorsionState st;
  st.w_full = to_full(sys, w);
  st.torsion = b.dot(w);
  st.min_interior = w.minCoeff();
  return st;
}

Eigen::VectorXd torsion_gradient(const TriMesh& mesh, const Eigen::VectorXd& w_full) {
  // dT(theta) = int [ (2w - |grad w|^2) Id + 2 grad w (x) grad w ] : D theta.
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * mesh.n);
  for (int t = 0; t < mesh.num_tris(); ++t) {
    const CoarseTri& c = mesh.coarse[mesh.tri_parent[t]];
    Vec2 gw = tri_grad(mesh, w_full, t);
    double area = mesh.tri_area(t);
    const auto& tr = mesh.tris[t];
    double intw = area / 3.0 * (w_full[tr[0]] + w_full[tr[1]] + w_full[tr[2]]);
    double scalar = 2.0 * intw - area * gw.squaredNorm();
    for (int i = 0; i < 3; ++i) {
      int p = c.corner_vertex[i];
      if (p < 0) continue;
      const Vec2& gphi = c.bary_grad[i];
      Vec2 contrib = scalar * gphi + 2.0 * area * gw.dot(gphi) * gw;
      g[2 * p] += contrib.x();
      g[2 * p + 1] += contrib.y();
    }
  }
  return g;
}

Eigen::MatrixXd torsion_hessian(const Polygon& p, const TriMesh& mesh) {
  int n = mesh.n;
  if (p.size() != n) throw std::invalid_argument("torsion_hessian: polygon/mesh mismatch");
  DirichletSystem sys = assemble(mesh);
  FemSolver solver(sys);
  Eigen::VectorXd b = unit_load(mesh, sys);
  Eigen::VectorXd w_full = to_full(sys, solver.solve(b));

  std::vector<std::vector<int>> tris_of_coarse(mesh.coarse.size());
  for (int t = 0; t < mesh.num_tris(); ++t) tris_of_coarse[mesh.tri_parent[t]].push_back(t);

  // Material solutions: int grad U_i^c . grad v =
  //   int [ -d_c(phi_i) grad w . grad v + (grad phi_i . grad w) d_c v
  //         + (grad phi_i . grad v) d_c w + v d_c(phi_i) ].
  std::vector<std::array<Eigen::VectorXd, 2>> u_mat(n);
  for (int i = 0; i < n; ++i)
    for (int comp = 0; comp < 2; ++comp) {
      Eigen::VectorXd f = Eigen::VectorXd::Zero(sys.interior.size());
      for (std::size_t cid = 0; cid < mesh.coarse.size(); ++cid) {
        Vec2 gphi = mesh.hat_grad(i, static_cast<int>(cid));
        if (gphi.isZero(0.0)) continue;
        double gphi_c = comp == 0 ? gphi.x() : gphi.y();
        for (int t : tris_of_coarse[cid]) {
          Vec2 gw = tri_grad(mesh, w_full, t);
          double area = mesh.tri_area(t);
          double gw_c = comp == 0 ? gw.x() : gw.y();
          double gphi_gw = gphi.dot(gw);
          for (int q = 0; q < 3; ++q) {
            int dof = sys.node_to_dof[mesh.tris[t][q]];
            if (dof < 0) continue;
            Vec2 gpsi = elem_hat_grad(mesh, t, q);
            double gpsi_c = comp == 0 ? gpsi.x() : gpsi.y();
            f[dof] += area * (-gphi_c * gw.dot(gpsi) + gphi_gw * gpsi_c +
                              gphi.dot(gpsi) * gw_c + gphi_c / 3.0);
          }
        }
      }
      u_mat[i][comp] = solver.solve(f);
    }

  // Second derivative, assembled entry-wise:
  //   (T_ij)_{ab} = 2 int grad U_i^a . grad U_j^b
  //     + int (2w - |grad w|^2) (d_a phi_i d_b phi_j - d_b phi_i d_a phi_j)
  //     + 2 int [ d_a w (grad phi_i . grad w) d_b phi_j
  //               + d_b w (grad phi_j . grad w) d_a phi_i ]
  //     - 2 int [ d_b phi_i (grad phi_j . grad w) d_a w
  //               + d_a phi_j (grad phi_i . grad w) d_b w
  //               + (grad phi_i . grad phi_j) d_a w d_b w ].
  std::size_t nc = mesh.coarse.size();
  std::vector<double> scal(nc, 0.0);                         // int (2w - |grad w|^2)
  std::vector<Eigen::Matrix2d> gw_outer(nc, Eigen::Matrix2d::Zero());  // int gw (x) gw
  for (int t = 0; t < mesh.num_tris(); ++t) {
    int cid = mesh.tri_parent[t];
    Vec2 gw = tri_grad(mesh, w_full, t);
    double area = mesh.tri_area(t);
    const auto& tr = mesh.tris[t];
    double intw = area / 3.0 * (w_full[tr[0]] + w_full[tr[1]] + w_full[tr[2]]);
    scal[cid] += 2.0 * intw - area * gw.squaredNorm();
    gw_outer[cid] += area * (gw * gw.transpose());
  }

  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::Matrix2d block = Eigen::Matrix2d::Zero();
      for (int a = 0; a < 2; ++a)
        for (int b2 = 0; b2 < 2; ++b2)
          block(a, b2) = 2.0 * u_mat[i][a].dot(sys.stiffness * u_mat[j][b2]);
      for (std::size_t cid = 0; cid < nc; ++cid) {
        Vec2 gi = mesh.hat_grad(i, static_cast<int>(cid));
        Vec2 gj = mesh.hat_grad(j, static_cast<int>(cid));
        if (gi.isZero(0.0) && gj.isZero(0.0)) continue;
        const Eigen::Matrix2d& gg = gw_outer[cid];
        for (int a = 0; a < 2; ++a)
          for (int b2 = 0; b2 < 2; ++b2) {
            double v = scal[cid] * (gi[a] * gj[b2] - gi[b2] * gj[a]);
            // int d_a w (gi . gw) d_b phi_j = gj_b * (gg * gi)_a etc.
            v += 2.0 * (gj[b2] * (gg * gi)(a) + gi[a] * (gg * gj)(b2));
            v -= 2.0 * (gi[b2] * (gg * gj)(a) + gj[a] * (gg * gi)(b2) +
                        gi.dot(gj) * gg(a, b2));
            block(a, b2) += v;
          }
      }
      hess.block<2, 2>(2 * i, 2 * j) = block;
    }
  return 0.5 * (hess + hess.transpose());
}

Eigen::MatrixXd torsion_objective_hessian(const Polygon& p, const TriMesh& mesh) {
  TorsionState st = solve_torsion(mesh);
  double a = p.area();
  double t = st.torsion;
  Eigen::VectorXd gt = torsion_gradient(mesh, st.w_full);
  Eigen::VectorXd ga = area_gradient(p);
  Eigen::MatrixXd ht = torsion_hessian(p, mesh);
  int n = p.size();
  double a2 = a * a, a3 = a2 * a, a4 = a3 * a;
  Eigen::MatrixXd hess = -ht / a2 + 2.0 / a3 * (gt * ga.transpose() + ga * gt.transpose()) -
                         6.0 * t / a4 * (ga * ga.transpose()) +
                         2.0 * t / a3 * area_hessian(n);
  return 0.5 * (hess + hess.transpose());
}

}  // namespace polyspec
