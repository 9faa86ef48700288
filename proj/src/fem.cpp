#include "polyspec/fem.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/Eigenvalues>

namespace polyspec {

namespace {

struct ElemGeom {
  Vec2 grad[3];  // gradients of the three nodal hats
  double area;
};

ElemGeom elem_geom(const TriMesh& mesh, int t) {
  const auto& tr = mesh.tris[t];
  Vec2 p0 = mesh.nodes[tr[0]], p1 = mesh.nodes[tr[1]], p2 = mesh.nodes[tr[2]];
  Vec2 e0 = p2 - p1, e1 = p0 - p2, e2 = p1 - p0;
  double a2 = e2.x() * (-e1.y()) - e2.y() * (-e1.x());
  if (a2 <= 0.0) throw std::runtime_error("assemble: degenerate or inverted triangle");
  ElemGeom g;
  g.area = 0.5 * a2;
  g.grad[0] = Vec2(-e0.y(), e0.x()) / a2;
  g.grad[1] = Vec2(-e1.y(), e1.x()) / a2;
  g.grad[2] = Vec2(-e2.y(), e2.x()) / a2;
  return g;
}

}  // namespace

DirichletSystem assemble(const TriMesh& mesh) {
  DirichletSystem sys;
  int nn = mesh.num_nodes();
  sys.node_to_dof.assign(nn, -1);
  for (int v = 0; v < nn; ++v)
    if (!mesh.node_boundary[v]) {
      sys.node_to_dof[v] = static_cast<int>(sys.interior.size());
      sys.interior.push_back(v);
    }
  int ni = static_cast<int>(sys.interior.size());
  if (ni == 0) throw std::runtime_error("assemble: no interior dofs");

  std::vector<Eigen::Triplet<double>> ta, tb;
  ta.reserve(static_cast<std::size_t>(mesh.num_tris()) * 9);
  tb.reserve(static_cast<std::size_t>(mesh.num_tris()) * 9);
  for (int t = 0; t < mesh.num_tris(); ++t) {
    ElemGeom g = elem_geom(mesh, t);
    const auto& tr = mesh.tris[t];
    for (int i = 0; i < 3; ++i) {
      int di = sys.node_to_dof[tr[i]];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        int dj = sys.node_to_dof[tr[j]];
        if (dj < 0) continue;
        ta.emplace_back(di, dj, g.area * g.grad[i].dot(g.grad[j]));
        tb.emplace_back(di, dj, g.area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0));
      }
    }
  }
  sys.stiffness.resize(ni, ni);
  sys.mass.resize(ni, ni);
  sys.stiffness.setFromTriplets(ta.begin(), ta.end());
  sys.mass.setFromTriplets(tb.begin(), tb.end());
  return sys;
}

Eigen::VectorXd to_full(const DirichletSystem& sys, const Eigen::VectorXd& interior) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(sys.node_to_dof.size());
  for (std::size_t d = 0; d < sys.interior.size(); ++d) full[sys.interior[d]] = interior[d];
  return full;
}

Eigen::VectorXd to_interior(const DirichletSystem& sys, const Eigen::VectorXd& full) {
  Eigen::VectorXd v(sys.interior.size());
  for (std::size_t d = 0; d < sys.interior.size(); ++d) v[d] = full[sys.interior[d]];
  return v;
}

FemSolver::FemSolver(const DirichletSystem& sys) : sys_(&sys) {
  chol_.compute(sys.stiffness);
  if (chol_.info() != Eigen::Success)
    throw std::runtime_error("FemSolver: stiffness factorization failed");
}

std::vector<EigenPair> FemSolver::solve_eigs(int count, double rel_tol, int max_iter) const {
  const SparseSym& A = sys_->stiffness;
  const SparseSym& B = sys_->mass;
  int n = static_cast<int>(A.rows());
  int q = std::min(n, count + 2);
  if (count < 1 || count > n) throw std::invalid_argument("solve_eigs: bad count");

  std::mt19937_64 rng(12345u);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd x(n, q);
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = unif(rng);

  Eigen::VectorXd ritz = Eigen::VectorXd::Zero(q);
  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::MatrixXd y(n, q);
    for (int j = 0; j < q; ++j) y.col(j) = chol_.solve(B * x.col(j));
    Eigen::MatrixXd s = y.transpose() * (B * y);
    Eigen::MatrixXd g = y.transpose() * (A * y);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> small(
        0.5 * (g + g.transpose()), 0.5 * (s + s.transpose()));
    if (small.info() != Eigen::Success)
      throw std::runtime_error("solve_eigs: Rayleigh-Ritz failure");
    x = y * small.eigenvectors();
    ritz = small.eigenvalues();

    bool done = true;
    for (int j = 0; j < count && done; ++j) {
      double res = (A * x.col(j) - ritz[j] * (B * x.col(j))).norm();
      if (res > rel_tol * std::abs(ritz[j])) done = false;
    }
    if (done) break;
    if (iter + 1 == max_iter)
      throw std::runtime_error("solve_eigs: no convergence after max iterations, residual " +
                               std::to_string((A * x.col(0) - ritz[0] * (B * x.col(0))).norm()));
  }

  std::vector<EigenPair> out(count);
  for (int j = 0; j < count; ++j) {
    Eigen::VectorXd v = x.col(j);
    v /= std::sqrt(v.dot(B * v));
    if (j == 0) {
      int imax;
      v.cwiseAbs().maxCoeff(&imax);
      if (v[imax] < 0.0) v = -v;
    }
    out[j].lambda = ritz[j];
    out[j].vec = v;
    out[j].residual = (A * v - ritz[j] * (B * v)).norm();
  }
  if (count >= 2 && out[1].lambda - out[0].lambda <= 1e-8 * out[0].lambda)
    throw std::runtime_error("solve_eigs: first eigenvalue not simple on this mesh");
  return out;
}

Eigen::VectorXd FemSolver::solve(const Eigen::VectorXd& rhs) const { return chol_.solve(rhs); }

Eigen::VectorXd FemSolver::deflated_solve(double lambda, const Eigen::VectorXd& deflation,
                                          const Eigen::VectorXd& rhs, double rel_tol,
                                          int max_iter) const {
  const SparseSym& A = sys_->stiffness;
  const SparseSym& B = sys_->mass;
  Eigen::VectorXd bd = B * deflation;
  double dbd = deflation.dot(bd);
  double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return Eigen::VectorXd::Zero(rhs.size());
  double defect = std::abs(deflation.dot(rhs)) / (rhs_norm * std::sqrt(dbd));
  if (defect > 1e-8)
    throw std::runtime_error("deflated_solve: rhs not orthogonal to deflation vector (defect " +
                             std::to_string(defect) + ")");

  auto project = [&](Eigen::VectorXd& v) { v -= (bd.dot(v) / dbd) * deflation; };
  Eigen::VectorXd f = rhs - (deflation.dot(rhs) / dbd) * bd;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(f.size());
  Eigen::VectorXd r = f;
  Eigen::VectorXd z = chol_.solve(r);
  project(z);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  double best = r.norm();
  int stagnation = 0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd ap = A * p - lambda * (B * p);
    double alpha = rz / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    double rn = r.norm();
    if (rn <= rel_tol * rhs_norm) {
      project(x);
      return x;
    }
    if (rn < best) {
      best = rn;
      stagnation = 0;
    } else if (++stagnation > 50) {
      throw std::runtime_error("deflated_solve: CG stagnation, residual " + std::to_string(rn));
    }
    z = chol_.solve(r);
    project(z);
    double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw std::runtime_error("deflated_solve: CG did not converge, residual " +
                           std::to_string(best));
}

double FemSolver::bilinear(double lambda, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v) const {
  return u.dot(sys_->stiffness * v) - lambda * u.dot(sys_->mass * v);
}

std::vector<EigenPair> solve_eigs(const DirichletSystem& sys, int count) {
  return FemSolver(sys).solve_eigs(count);
}

Vec2 tri_grad(const TriMesh& mesh, const Eigen::VectorXd& u_full, int t) {
  ElemGeom g = elem_geom(mesh, t);
  const auto& tr = mesh.tris[t];
  return u_full[tr[0]] * g.grad[0] + u_full[tr[1]] * g.grad[1] + u_full[tr[2]] * g.grad[2];
}

double tri_mass_sq(const TriMesh& mesh, const Eigen::VectorXd& u_full, int t) {
  const auto& tr = mesh.tris[t];
  double u0 = u_full[tr[0]], u1 = u_full[tr[1]], u2 = u_full[tr[2]];
  double s = u0 + u1 + u2;
  return mesh.tri_area(t) / 12.0 * (s * s + u0 * u0 + u1 * u1 + u2 * u2);
}

std::vector<Eigen::Matrix2d> slice_gradient_products(const TriMesh& mesh,
                                                     const Eigen::VectorXd& u_full,
                                                     const Eigen::VectorXd& w_full) {
  if (mesh.tri_parent.empty()) throw std::runtime_error("slice_gradient_products: no slice tags");
  std::vector<Eigen::Matrix2d> out(mesh.coarse.size(), Eigen::Matrix2d::Zero());
  for (int t = 0; t < mesh.num_tris(); ++t) {
    Vec2 gu = tri_grad(mesh, u_full, t);
    Vec2 gw = tri_grad(mesh, w_full, t);
    out[mesh.tri_parent[t]] += mesh.tri_area(t) * (gu * gw.transpose());
  }
  return out;
}

double segment_mass(const TriMesh& mesh, const Eigen::VectorXd& u_full) {
  if (mesh.kind != MeshKind::SymmetricFan)
    throw std::invalid_argument("segment_mass: S_0 is resolved only by symmetric meshes");
  int m = mesh.m;
  // Nodes on the ray from the center to vertex 0 are center, (i, 0) of slice 0.
  auto node_on_ray = [&](int i) -> int {
    if (i == 0) return 0;
    return 1 + (i - 1) * (2 * m + 2 - i) / 2;
  };
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    double ua = u_full[node_on_ray(i)];
    double ub = u_full[node_on_ray(i + 1)];
    total += (ua * ua + ua * ub + ub * ub) / (3.0 * m);
  }
  return total;
}

std::vector<BoundaryEdgeDatum> boundary_energy_per_edge(const TriMesh& mesh,
                                                        const Eigen::VectorXd& u_full) {
  std::unordered_map<std::int64_t, std::pair<int, int>> edge_info;  // key -> (count, tri)
  auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::int64_t>(a) << 32) | static_cast<std::int64_t>(b);
  };
  for (int t = 0; t < mesh.num_tris(); ++t)
    for (int e = 0; e < 3; ++e) {
      auto& info = edge_info[key(mesh.tris[t][e], mesh.tris[t][(e + 1) % 3])];
      ++info.first;
      info.second = t;
    }

  std::vector<BoundaryEdgeDatum> out;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    Vec2 gu = tri_grad(mesh, u_full, t);
    for (int e = 0; e < 3; ++e) {
      int a = mesh.tris[t][e];
      int b = mesh.tris[t][(e + 1) % 3];
      auto info = edge_info[key(a, b)];
      if (info.first != 1) continue;
      BoundaryEdgeDatum d;
      d.a = a;
      d.b = b;
      d.tri = t;
      d.grad_sq = gu.squaredNorm();
      Vec2 dir = mesh.nodes[b] - mesh.nodes[a];
      d.length = dir.norm();
      d.outward_normal = Vec2(dir.y(), -dir.x()) / d.length;
      out.push_back(d);
    }
  }
  return out;
}

}  // namespace polyspec
