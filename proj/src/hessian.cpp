#include "polyspec/hessian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polyspec {

namespace {

Vec2 elem_hat_grad(const TriMesh& mesh, int t, int local) {
  const auto& tr = mesh.tris[t];
  Vec2 p0 = mesh.nodes[tr[0]], p1 = mesh.nodes[tr[1]], p2 = mesh.nodes[tr[2]];
  Vec2 e;
  switch (local) {
    case 0: e = p2 - p1; break;
    case 1: e = p0 - p2; break;
    default: e = p1 - p0; break;
  }
  double a2 = 2.0 * mesh.tri_area(t);
  return Vec2(-e.y(), e.x()) / a2;
}

// Applies the j-th power of the rotation action (v -> v o R_{j theta}^T)
// to a full nodal vector through the inverse rotation permutation.
Eigen::VectorXd rotate_field(const TriMesh& mesh, const std::vector<int>& rot_inv,
                             const Eigen::VectorXd& v, int j) {
  Eigen::VectorXd out = v;
  for (int rep = 0; rep < j; ++rep) {
    Eigen::VectorXd next(out.size());
    for (int node = 0; node < out.size(); ++node) next[node] = out[rot_inv[node]];
    out.swap(next);
  }
  return out;
}

std::vector<int> invert_permutation(const std::vector<int>& p) {
  std::vector<int> inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<int>(i);
  return inv;
}

}  // namespace

Eigen::VectorXd eig_gradient(const TriMesh& mesh, const Eigen::VectorXd& u_full,
                             double lambda) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * mesh.n);
  for (int t = 0; t < mesh.num_tris(); ++t) {
    const CoarseTri& c = mesh.coarse[mesh.tri_parent[t]];
    Vec2 gu = tri_grad(mesh, u_full, t);
    double area = mesh.tri_area(t);
    double scalar = gu.squaredNorm() * area - lambda * tri_mass_sq(mesh, u_full, t);
    for (int i = 0; i < 3; ++i) {
      int p = c.corner_vertex[i];
      if (p < 0) continue;
      const Vec2& gphi = c.bary_grad[i];
      Vec2 contrib = scalar * gphi - 2.0 * area * gu.dot(gphi) * gu;
      g[2 * p] += contrib.x();
      g[2 * p + 1] += contrib.y();
    }
  }
  return g;
}

Eigen::VectorXd eig_gradient_boundary(const TriMesh& mesh, const Eigen::VectorXd& u_full) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * mesh.n);
  auto edges = boundary_energy_per_edge(mesh, u_full);
  for (const auto& e : edges) {
    const CoarseTri& c = mesh.coarse[mesh.tri_parent[e.tri]];
    for (int i = 0; i < 3; ++i) {
      int p = c.corner_vertex[i];
      if (p < 0) continue;
      double phi_a = mesh.hat_value(p, e.a);
      double phi_b = mesh.hat_value(p, e.b);
      double integral = 0.5 * e.length * (phi_a + phi_b);
      Vec2 contrib = -e.grad_sq * integral * e.outward_normal;
      g[2 * p] += contrib.x();
      g[2 * p + 1] += contrib.y();
    }
  }
  return g;
}

Eigen::VectorXd j_gradient(const Polygon& p, const TriMesh& mesh,
                           const Eigen::VectorXd& u_full, double lambda) {
  return lambda * area_gradient(p) + p.area() * eig_gradient(mesh, u_full, lambda);
}

double s1_lambda(const TriMesh& mesh, const Eigen::VectorXd& u_full) {
  if (mesh.kind != MeshKind::SymmetricFan)
    throw std::invalid_argument("s1_lambda: needs a symmetric mesh");
  double theta = 2.0 * M_PI / mesh.n;
  double axx = 0.0, axy = 0.0;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    if (mesh.tri_parent[t] != 0) continue;
    Vec2 gu = tri_grad(mesh, u_full, t);
    double area = mesh.tri_area(t);
    axx += area * gu.x() * gu.x();
    axy += area * gu.x() * gu.y();
  }
  return -4.0 * (axx - axy / std::tan(theta));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> material_rhs(const TriMesh& mesh,
                                                         const DirichletSystem& sys,
                                                         const Eigen::VectorXd& u_full,
                                                         double s1h) {
  if (mesh.kind != MeshKind::SymmetricFan)
    throw std::invalid_argument("material_rhs: needs a symmetric mesh");
  int ni = static_cast<int>(sys.interior.size());
  Eigen::VectorXd f1 = Eigen::VectorXd::Zero(ni);
  Eigen::VectorXd f2 = Eigen::VectorXd::Zero(ni);

  for (int t = 0; t < mesh.num_tris(); ++t) {
    int slice = mesh.tri_parent[t];
    if (slice != 0 && slice != mesh.n - 1) continue;
    Vec2 gphi = mesh.hat_grad(0, slice);
    Vec2 gu = tri_grad(mesh, u_full, t);
    double area = mesh.tri_area(t);
    double gphi_gu = gphi.dot(gu);
    for (int q = 0; q < 3; ++q) {
      int dof = sys.node_to_dof[mesh.tris[t][q]];
      if (dof < 0) continue;
      Vec2 gpsi = elem_hat_grad(mesh, t, q);
      double gphi_gpsi = gphi.dot(gpsi);
      f1[dof] += area * (gphi_gu * gpsi.x() + gphi_gpsi * gu.x());
      f2[dof] += area * (gphi_gu * gpsi.y() + gphi_gpsi * gu.y());
    }
  }
  Eigen::VectorXd u_int = to_interior(sys, u_full);
  f1 += s1h * (sys.mass * u_int);

  double defect = std::abs(f1.dot(u_int)) / std::max(1e-300, f1.norm());
  double defect2 = std::abs(f2.dot(u_int)) / std::max(1e-300, f2.norm());
  if (std::max(defect, defect2) > 1e-8)
    throw std::runtime_error("material_rhs: symmetry violation, rhs not orthogonal to u_1h");
  return {f1, f2};
}

MaterialSolution solve_U0(const FemSolver& solver, const TriMesh& mesh,
                          const EigenPair& e1, const EigenPair& e2) {
  const DirichletSystem& sys = solver.system();
  MaterialSolution out;
  out.lambda1 = e1.lambda;
  out.lambda2 = e2.lambda;
  out.u_full = to_full(sys, e1.vec);
  out.s1h = s1_lambda(mesh, out.u_full);
  auto [f1, f2] = material_rhs(mesh, sys, out.u_full, out.s1h);
  out.U1_full = to_full(sys, solver.deflated_solve(e1.lambda, e1.vec, f1));
  out.U2_full = to_full(sys, solver.deflated_solve(e1.lambda, e1.vec, f2));
  return out;
}

double parity_defect(const TriMesh& mesh, const MaterialSolution& u0) {
  double worst = 0.0;
  for (int v = 0; v < mesh.num_nodes(); ++v) {
    int w = mesh.sym.refl[v];
    worst = std::max(worst, std::abs(u0.U1_full[w] - u0.U1_full[v]));
    worst = std::max(worst, std::abs(u0.U2_full[w] + u0.U2_full[v]));
  }
  return worst;
}

Coefficients coefficients(const TriMesh& mesh, const FemSolver& solver,
                          const MaterialSolution& u0, int k) {
  int n = mesh.n;
  if (k < 0 || k >= n) throw std::invalid_argument("coefficients: k out of range");
  const DirichletSystem& sys = solver.system();
  double theta = 2.0 * M_PI / n;
  double area = 0.5 * n * std::sin(theta);
  double lambda = u0.lambda1;
  double qk = 2.0 * n * (1.0 - std::cos(k * theta)) / std::sin(theta);

  auto g1 = slice_gradient_products(mesh, u0.u_full, u0.U1_full);
  auto g2 = slice_gradient_products(mesh, u0.u_full, u0.U2_full);
  auto guu = slice_gradient_products(mesh, u0.u_full, u0.u_full);
  double axx = guu[0](0, 0), ayy = guu[0](1, 1);

  // Slice-integral expansions of the four bilinear forms.
  double form_a = 0.0, form_b = 0.0, form_g1 = 0.0, form_g2 = 0.0;
  double cot = std::cos(theta) / std::sin(theta);
  for (int j = 0; j < n; ++j) {
    double cjk = std::cos(j * k * theta), cj1k = std::cos((j + 1) * k * theta);
    double sjk = std::sin(j * k * theta), sj1k = std::sin((j + 1) * k * theta);
    double s2j = std::sin((2 * j + 1) * theta), c2j = std::cos((2 * j + 1) * theta);
    auto contract_alpha = [&](const Eigen::Matrix2d& g) {
      // [[-s2j, c2j], [c2j, s2j]] : with G(p,q) = int d_p u d_q w
      return -s2j * g(0, 0) + s2j * g(1, 1) + c2j * (g(0, 1) + g(1, 0));
    };
    auto contract_beta = [&](const Eigen::Matrix2d& g) {
      // [[-c2j, -s2j], [-s2j, c2j]]
      return -c2j * g(0, 0) + c2j * g(1, 1) - s2j * (g(0, 1) + g(1, 0));
    };
    double tr1 = g1[j].trace(), tr2 = g2[j].trace();
    form_a += (cj1k + cjk) * tr1 + (cj1k - cjk) / std::sin(theta) * contract_alpha(g1[j]);
    form_b += cot * (cj1k - cjk) * tr2 + (cj1k - cjk) / std::sin(theta) * contract_beta(g2[j]);
    form_g1 += cot * (sj1k - sjk) * tr1 + (sj1k - sjk) / std::sin(theta) * contract_beta(g1[j]);
    form_g2 += (sj1k + sjk) * tr2 + (sj1k - sjk) / std::sin(theta) * contract_alpha(g2[j]);
  }

  Coefficients c;
  c.alpha_check = qk * axx - 2.0 * area * form_a;
  c.beta_check = qk * ayy - 2.0 * area * form_b;

  // Bilinear-form route through the symmetry-permuted combinations of U_0.
  std::vector<int> rot_inv = invert_permutation(mesh.sym.rot);
  Eigen::VectorXd w_alpha = Eigen::VectorXd::Zero(mesh.num_nodes());
  Eigen::VectorXd w_beta = w_alpha, w_g1 = w_alpha, w_g2 = w_alpha;
  Eigen::VectorXd rot1 = u0.U1_full, rot2 = u0.U2_full;
  for (int j = 0; j < n; ++j) {
    double cjk = std::cos(j * k * theta), sjk = std::sin(j * k * theta);
    w_alpha += cjk * rot1;
    w_beta += cjk * rot2;
    w_g1 += sjk * rot2;
    w_g2 += sjk * rot1;
    if (j + 1 < n) {
      rot1 = rotate_field(mesh, rot_inv, rot1, 1);
      rot2 = rotate_field(mesh, rot_inv, rot2, 1);
    }
  }
  Eigen::VectorXd u1_int = to_interior(sys, u0.U1_full);
  Eigen::VectorXd u2_int = to_interior(sys, u0.U2_full);
  c.alpha = qk * axx - 2.0 * area * solver.bilinear(lambda, u1_int, to_interior(sys, w_alpha));
  c.beta = qk * ayy - 2.0 * area * solver.bilinear(lambda, u2_int, to_interior(sys, w_beta));
  c.gamma1 = -2.0 * area * solver.bilinear(lambda, u1_int, to_interior(sys, w_g1));
  c.gamma2 = 2.0 * area * solver.bilinear(lambda, u2_int, to_interior(sys, w_g2));
  c.gamma_gap = std::abs(c.gamma1 - c.gamma2);

  double scale = std::max({1.0, std::abs(c.alpha), std::abs(c.beta), qk * axx});
  if (std::abs(c.alpha - c.alpha_check) > 1e-5 * scale ||
      std::abs(c.beta - c.beta_check) > 1e-5 * scale)
    throw std::runtime_error("coefficients: slice expansion disagrees with bilinear form "
                             "(mesh asymmetry or solver failure)");
  return c;
}

std::pair<double, double> block_eigenvalues(double a, double b, double g) {
  double disc = std::sqrt((a - b) * (a - b) + 4.0 * g * g);
  return {0.5 * (a + b - disc), 0.5 * (a + b + disc)};
}

HessianSpectrum hessian_spectrum(const TriMesh& mesh, const FemSolver& solver,
                                 const MaterialSolution& u0) {
  int n = mesh.n;
  HessianSpectrum spec;
  spec.n = n;
  spec.m = mesh.m;
  spec.lambda1 = u0.lambda1;
  spec.lambda2 = u0.lambda2;
  spec.s1h = u0.s1h;
  auto guu = slice_gradient_products(mesh, u0.u_full, u0.u_full);
  spec.axx = guu[0](0, 0);
  spec.ayy = guu[0](1, 1);
  spec.axy = 0.5 * (guu[0](0, 1) + guu[0](1, 0));

  spec.coeffs.resize(n);
  for (int k = 0; k < n; ++k) {
    spec.coeffs[k] = coefficients(mesh, solver, u0, k);
    auto [lo, hi] = block_eigenvalues(spec.coeffs[k].alpha, spec.coeffs[k].beta,
                                      spec.coeffs[k].gamma1);
    spec.mu.push_back(lo);
    spec.mu.push_back(hi);
  }
  std::sort(spec.mu.begin(), spec.mu.end());

  double mu_max = 0.0;
  for (double v : spec.mu) mu_max = std::max(mu_max, std::abs(v));
  std::vector<double> nonzero;
  for (double v : spec.mu) {
    if (std::abs(v) <= 1e-4 * mu_max)
      ++spec.zero_count;
    else
      nonzero.push_back(v);
  }
  for (double v : nonzero) {
    if (!spec.distinct_nonzero.empty() &&
        std::abs(v - spec.distinct_nonzero.back().first) <= 1e-6 * mu_max)
      ++spec.distinct_nonzero.back().second;
    else
      spec.distinct_nonzero.emplace_back(v, 1);
  }
  return spec;
}

HessianSpectrum hessian_spectrum(int n, int m) {
  if (n < 3) throw std::invalid_argument("hessian_spectrum: n must be >= 3");
  TriMesh mesh = symmetric_mesh(n, m);
  DirichletSystem sys = assemble(mesh);
  FemSolver solver(sys);
  auto eigs = solver.solve_eigs(2);
  MaterialSolution u0 = solve_U0(solver, mesh, eigs[0], eigs[1]);
  return hessian_spectrum(mesh, solver, u0);
}

namespace {

// Load vector of the full material-derivative right-hand side for vertex i,
// component c, on an arbitrary hat carrier:
//   (f_i^c, v) = int [ -d_c(phi_i) grad u . grad v + (grad phi_i . grad u) d_c v
//                      + (grad phi_i . grad v) d_c u ]
//                + lambda int u v d_c(phi_i) + g_i^c int u v.
Eigen::VectorXd general_material_rhs(const TriMesh& mesh, const DirichletSystem& sys,
                                     const Eigen::VectorXd& u_full, double lambda,
                                     const Eigen::VectorXd& bu_int,
                                     const std::vector<std::vector<int>>& tris_of_coarse,
                                     int vertex, int comp, double grad_component) {
  Eigen::VectorXd f = grad_component * bu_int;
  for (std::size_t cid = 0; cid < mesh.coarse.size(); ++cid) {
    Vec2 gphi = mesh.hat_grad(vertex, static_cast<int>(cid));
    if (gphi.isZero(0.0)) continue;
    double gphi_c = comp == 0 ? gphi.x() : gphi.y();
    for (int t : tris_of_coarse[cid]) {
      Vec2 gu = tri_grad(mesh, u_full, t);
      double area = mesh.tri_area(t);
      double gu_c = comp == 0 ? gu.x() : gu.y();
      double gphi_gu = gphi.dot(gu);
      const auto& tr = mesh.tris[t];
      double usum = u_full[tr[0]] + u_full[tr[1]] + u_full[tr[2]];
      for (int q = 0; q < 3; ++q) {
        int dof = sys.node_to_dof[tr[q]];
        if (dof < 0) continue;
        Vec2 gpsi = elem_hat_grad(mesh, t, q);
        double gpsi_c = comp == 0 ? gpsi.x() : gpsi.y();
        double mass_uq = area / 12.0 * (usum + u_full[tr[q]]);
        f[dof] += area * (-gphi_c * gu.dot(gpsi) + gphi_gu * gpsi_c + gphi.dot(gpsi) * gu_c) +
                  lambda * gphi_c * mass_uq;
      }
    }
  }
  return f;
}

}  // namespace

Eigen::MatrixXd hessian_blocks_direct(const Polygon& p, const TriMesh& mesh) {
  int n = mesh.n;
  if (p.size() != n) throw std::invalid_argument("hessian_blocks_direct: polygon/mesh mismatch");
  DirichletSystem sys = assemble(mesh);
  FemSolver solver(sys);
  auto eigs = solver.solve_eigs(2);
  double lambda = eigs[0].lambda;
  Eigen::VectorXd u_full = to_full(sys, eigs[0].vec);
  double area = p.area();

  Eigen::VectorXd g_lambda = eig_gradient(mesh, u_full, lambda);
  Eigen::VectorXd g_area = area_gradient(p);

  std::vector<std::vector<int>> tris_of_coarse(mesh.coarse.size());
  for (int t = 0; t < mesh.num_tris(); ++t) tris_of_coarse[mesh.tri_parent[t]].push_back(t);

  // Per-coarse accumulators for the algebraic terms.
  std::size_t nc = mesh.coarse.size();
  std::vector<double> w_energy(nc, 0.0);   // int (|grad u|^2 + lambda u^2)
  std::vector<double> v_mass(nc, 0.0);     // int u^2
  std::vector<Eigen::Matrix2d> p_outer(nc, Eigen::Matrix2d::Zero());  // int grad u (x) grad u
  for (int t = 0; t < mesh.num_tris(); ++t) {
    int cid = mesh.tri_parent[t];
    Vec2 gu = tri_grad(mesh, u_full, t);
    double a = mesh.tri_area(t);
    double msq = tri_mass_sq(mesh, u_full, t);
    w_energy[cid] += a * gu.squaredNorm() + lambda * msq;
    v_mass[cid] += msq;
    p_outer[cid] += a * (gu * gu.transpose());
  }

  // All 2n material solutions.
  Eigen::VectorXd bu_int = sys.mass * to_interior(sys, u_full);
  std::vector<std::array<Eigen::VectorXd, 2>> u_mat(n);
  for (int i = 0; i < n; ++i)
    for (int comp = 0; comp < 2; ++comp) {
      Eigen::VectorXd f = general_material_rhs(mesh, sys, u_full, lambda, bu_int,
                                               tris_of_coarse, i, comp,
                                               g_lambda[2 * i + comp]);
      u_mat[i][comp] = solver.deflated_solve(lambda, eigs[0].vec, f);
    }

  std::vector<std::array<Eigen::VectorXd, 2>> op_u(n);  // (A - lambda B) U_i^c
  for (int i = 0; i < n; ++i)
    for (int comp = 0; comp < 2; ++comp)
      op_u[i][comp] = sys.stiffness * u_mat[i][comp] - lambda * (sys.mass * u_mat[i][comp]);

  Eigen::MatrixXd hess_l = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::Matrix2d block = Eigen::Matrix2d::Zero();
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) block(a, b) = -2.0 * u_mat[i][a].dot(op_u[j][b]);
      for (std::size_t cid = 0; cid < nc; ++cid) {
        Vec2 gi = mesh.hat_grad(i, static_cast<int>(cid));
        Vec2 gj = mesh.hat_grad(j, static_cast<int>(cid));
        if (gi.isZero(0.0) && gj.isZero(0.0)) continue;
        Eigen::Matrix2d anti = gi * gj.transpose() - gj * gi.transpose();
        block -= w_energy[cid] * anti;
        block += 2.0 * gi.dot(gj) * p_outer[cid];
        Vec2 qi = v_mass[cid] * gi;
        Vec2 qj = v_mass[cid] * gj;
        Vec2 glam_i(g_lambda[2 * i], g_lambda[2 * i + 1]);
        Vec2 glam_j(g_lambda[2 * j], g_lambda[2 * j + 1]);
        block -= qi * glam_j.transpose() + glam_i * qj.transpose();
      }
      hess_l.block<2, 2>(2 * i, 2 * j) = block;
    }

  Eigen::MatrixXd m = area * hess_l + g_lambda * g_area.transpose() +
                      g_area * g_lambda.transpose() + lambda * area_hessian(n);
  return 0.5 * (m + m.transpose());
}

}  // namespace polyspec
