#include "polyspec/mesh.hpp"

#include <cmath>
#include <fstream>
#include <list>
#include <map>
#include <stdexcept>

namespace polyspec {

namespace {

void finalize_coarse(CoarseTri& c) {
  Vec2 e0 = c.corner_pos[2] - c.corner_pos[1];
  Vec2 e1 = c.corner_pos[0] - c.corner_pos[2];
  Vec2 e2 = c.corner_pos[1] - c.corner_pos[0];
  double a2 = e2.x() * (-e1.y()) - e2.y() * (-e1.x());  // 2 * signed area
  if (a2 <= 0.0) throw std::invalid_argument("coarse triangle not CCW");
  c.area = 0.5 * a2;
  c.bary_grad[0] = Vec2(-e0.y(), e0.x()) / a2;
  c.bary_grad[1] = Vec2(-e1.y(), e1.x()) / a2;
  c.bary_grad[2] = Vec2(-e2.y(), e2.x()) / a2;
}

Eigen::Vector3d barycentric(const CoarseTri& c, const Vec2& x) {
  Eigen::Vector3d b;
  for (int i = 0; i < 3; ++i)
    b[i] = 1.0 + c.bary_grad[i].dot(x - c.corner_pos[i]);
  return b;
}

bool point_in_closed_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  return orient2d(a, b, p) >= 0 && orient2d(b, c, p) >= 0 && orient2d(c, a, p) >= 0;
}

}  // namespace

double TriMesh::tri_area(int t) const {
  const auto& tr = tris[t];
  Vec2 u = nodes[tr[1]] - nodes[tr[0]];
  Vec2 v = nodes[tr[2]] - nodes[tr[0]];
  return 0.5 * (u.x() * v.y() - u.y() * v.x());
}

double TriMesh::mesh_area() const {
  double a = 0.0;
  for (int t = 0; t < num_tris(); ++t) a += tri_area(t);
  return a;
}

double TriMesh::hat_value(int p, int node) const {
  const CoarseTri& c = coarse[node_parent[node]];
  for (int i = 0; i < 3; ++i)
    if (c.corner_vertex[i] == p) return barycentric(c, nodes[node])[i];
  return 0.0;
}

Vec2 TriMesh::hat_grad(int p, int cid) const {
  const CoarseTri& c = coarse[cid];
  for (int i = 0; i < 3; ++i)
    if (c.corner_vertex[i] == p) return c.bary_grad[i];
  return Vec2::Zero();
}

void TriMesh::dump(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("TriMesh::dump: cannot open " + path);
  out.precision(17);
  out << "nodes " << num_nodes() << "\n";
  for (const auto& p : nodes) out << p.x() << " " << p.y() << "\n";
  out << "triangles " << num_tris() << "\n";
  for (int t = 0; t < num_tris(); ++t)
    out << tris[t][0] << " " << tris[t][1] << " " << tris[t][2] << " " << tri_parent[t] << "\n";
  out << "boundary\n";
  for (int i = 0; i < num_nodes(); ++i)
    if (node_boundary[i]) out << i << "\n";
}

std::int64_t symmetric_mesh_node_count(int n, int m) {
  return 1 + static_cast<std::int64_t>(n) * m * (m + 1) / 2;
}

namespace {

struct SliceIndexer {
  int n, m;
  std::int64_t per_slice;

  int canonical(int j, int i, int k) const {
    if (i == 0 && k == 0) return 0;
    if (i == 0) {
      j = (j + 1) % n;
      i = k;
      k = 0;
    }
    std::int64_t off = static_cast<std::int64_t>(i - 1) * (2 * m + 2 - i) / 2 + k;
    return static_cast<int>(1 + j * per_slice + off);
  }
};

}  // namespace

TriMesh symmetric_mesh(int n, int m) {
  if (n < 3) throw std::invalid_argument("symmetric_mesh: n must be >= 3");
  if (m < 1) throw std::invalid_argument("symmetric_mesh: m must be >= 1");
  std::int64_t count = symmetric_mesh_node_count(n, m);
  constexpr std::int64_t kMaxNodes = 60'000'000;
  if (count > kMaxNodes)
    throw std::runtime_error("symmetric_mesh: required node count " + std::to_string(count) +
                             " exceeds the in-memory budget of " + std::to_string(kMaxNodes));

  // Vertex table with bit-exact reflection symmetry about the x-axis.
  std::vector<Vec2> vert(n);
  double theta = 2.0 * M_PI / n;
  for (int j = 0; j <= n / 2; ++j) vert[j] = Vec2(std::cos(j * theta), std::sin(j * theta));
  for (int j = n / 2 + 1; j < n; ++j) vert[j] = Vec2(vert[n - j].x(), -vert[n - j].y());

  TriMesh mesh;
  mesh.kind = MeshKind::SymmetricFan;
  mesh.n = n;
  mesh.m = m;
  mesh.h = 1.0 / m;  // median edge of {l_n/m, 1/m, 1/m}

  SliceIndexer idx{n, m, static_cast<std::int64_t>(m) * (m + 1) / 2};
  mesh.nodes.resize(count);
  mesh.node_boundary.assign(count, 0);
  mesh.node_parent.assign(count, 0);
  mesh.nodes[0] = Vec2::Zero();
  for (int j = 0; j < n; ++j) {
    const Vec2& a = vert[j];
    const Vec2& b = vert[(j + 1) % n];
    for (int i = 1; i <= m; ++i)
      for (int k = 0; k <= m - i; ++k) {
        int id = idx.canonical(j, i, k);
        mesh.nodes[id] = (static_cast<double>(i) * a + static_cast<double>(k) * b) / m;
        mesh.node_boundary[id] = (i + k == m);
        mesh.node_parent[id] = j;
      }
  }

  mesh.coarse.resize(n);
  for (int j = 0; j < n; ++j) {
    CoarseTri c;
    c.corner_vertex = {-1, j, (j + 1) % n};
    c.corner_pos = {Vec2::Zero(), vert[j], vert[(j + 1) % n]};
    finalize_coarse(c);
    mesh.coarse[j] = c;
  }

  mesh.tris.reserve(static_cast<std::size_t>(n) * m * m);
  mesh.tri_parent.reserve(static_cast<std::size_t>(n) * m * m);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i + 0 <= m - 1; ++i)
      for (int k = 0; i + k <= m - 1; ++k) {
        mesh.tris.push_back({idx.canonical(j, i, k), idx.canonical(j, i + 1, k),
                             idx.canonical(j, i, k + 1)});
        mesh.tri_parent.push_back(j);
        if (i + k <= m - 2) {
          mesh.tris.push_back({idx.canonical(j, i + 1, k), idx.canonical(j, i + 1, k + 1),
                               idx.canonical(j, i, k + 1)});
          mesh.tri_parent.push_back(j);
        }
      }
  }

  mesh.sym.rot.resize(count);
  mesh.sym.refl.resize(count);
  mesh.sym.rot[0] = 0;
  mesh.sym.refl[0] = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 1; i <= m; ++i)
      for (int k = 0; k <= m - i; ++k) {
        int id = idx.canonical(j, i, k);
        mesh.sym.rot[id] = idx.canonical((j + 1) % n, i, k);
        mesh.sym.refl[id] = idx.canonical((n - 1 - j) % n, k, i);
      }
  return mesh;
}

namespace {

std::vector<std::array<int, 3>> ear_clip(const Polygon& p) {
  int n = p.size();
  std::list<int> loop;
  for (int i = 0; i < n; ++i) loop.push_back(i);
  std::vector<std::array<int, 3>> tris;

  auto next = [&loop](std::list<int>::iterator it) {
    ++it;
    return it == loop.end() ? loop.begin() : it;
  };
  auto prev = [&loop](std::list<int>::iterator it) {
    if (it == loop.begin()) it = loop.end();
    --it;
    return it;
  };

  int guard = 0;
  while (loop.size() > 3) {
    if (++guard > n * n + 8 * n)
      throw std::invalid_argument("fan_refined_mesh: ear clipping failed (degenerate polygon)");
    bool clipped = false;
    for (auto it = loop.begin(); it != loop.end(); ++it) {
      int b = *it;
      int a = *prev(it);
      int c = *next(it);
      if (orient2d(p.vertex(a), p.vertex(b), p.vertex(c)) <= 0) continue;
      bool blocked = false;
      for (int v : loop) {
        if (v == a || v == b || v == c) continue;
        if (point_in_closed_triangle(p.vertex(v), p.vertex(a), p.vertex(b), p.vertex(c))) {
          blocked = true;
          break;
        }
      }
      if (blocked) continue;
      tris.push_back({a, b, c});
      loop.erase(it);
      clipped = true;
      break;
    }
    if (!clipped)
      throw std::invalid_argument("fan_refined_mesh: no ear found (collinear vertex?)");
  }
  auto it = loop.begin();
  int a = *it++;
  int b = *it++;
  int c = *it;
  if (orient2d(p.vertex(a), p.vertex(b), p.vertex(c)) <= 0)
    throw std::invalid_argument("fan_refined_mesh: degenerate final triangle");
  tris.push_back({a, b, c});
  return tris;
}

}  // namespace

TriMesh fan_refined_mesh(const Polygon& p, int levels) {
  if (levels < 0) throw std::invalid_argument("fan_refined_mesh: levels must be >= 0");
  int n = p.size();
  auto coarse_tris = ear_clip(p);

  TriMesh mesh;
  mesh.kind = MeshKind::EarClipFan;
  mesh.n = n;
  mesh.m = 1 << levels;
  mesh.nodes.resize(n);
  mesh.node_boundary.assign(n, 1);
  mesh.node_parent.assign(n, 0);
  for (int i = 0; i < n; ++i) mesh.nodes[i] = p.vertex(i);

  mesh.coarse.resize(coarse_tris.size());
  for (std::size_t c = 0; c < coarse_tris.size(); ++c) {
    CoarseTri ct;
    ct.corner_vertex = coarse_tris[c];
    for (int i = 0; i < 3; ++i) ct.corner_pos[i] = p.vertex(coarse_tris[c][i]);
    finalize_coarse(ct);
    mesh.coarse[c] = ct;
    for (int i = 0; i < 3; ++i) mesh.node_parent[coarse_tris[c][i]] = static_cast<int>(c);
  }
  for (std::size_t c = 0; c < coarse_tris.size(); ++c) {
    mesh.tris.push_back(coarse_tris[c]);
    mesh.tri_parent.push_back(static_cast<int>(c));
  }

  std::map<std::pair<int, int>, bool> boundary_edge;
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    boundary_edge[{std::min(i, j), std::max(i, j)}] = true;
  }

  for (int level = 0; level < levels; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    std::map<std::pair<int, int>, bool> next_boundary;
    auto split = [&](int a, int b, int parent) {
      auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      int id = mesh.num_nodes();
      mesh.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
      bool on_boundary = false;
      auto be = boundary_edge.find(key);
      if (be != boundary_edge.end() && be->second) on_boundary = true;
      mesh.node_boundary.push_back(on_boundary ? 1 : 0);
      mesh.node_parent.push_back(parent);
      if (on_boundary) {
        next_boundary[{std::min(a, id), std::max(a, id)}] = true;
        next_boundary[{std::min(b, id), std::max(b, id)}] = true;
      }
      midpoint[key] = id;
      return id;
    };

    std::vector<std::array<int, 3>> fine;
    std::vector<int> fine_parent;
    fine.reserve(mesh.tris.size() * 4);
    fine_parent.reserve(mesh.tris.size() * 4);
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
      auto [a, b, c] = mesh.tris[t];
      int par = mesh.tri_parent[t];
      int ab = split(a, b, par);
      int bc = split(b, c, par);
      int ca = split(c, a, par);
      fine.push_back({a, ab, ca});
      fine.push_back({ab, b, bc});
      fine.push_back({ca, bc, c});
      fine.push_back({ab, bc, ca});
      for (int r = 0; r < 4; ++r) fine_parent.push_back(par);
    }
    mesh.tris = std::move(fine);
    mesh.tri_parent = std::move(fine_parent);
    boundary_edge = std::move(next_boundary);
  }

  double hmax = 0.0;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    const auto& tr = mesh.tris[t];
    double e0 = (mesh.nodes[tr[1]] - mesh.nodes[tr[0]]).norm();
    double e1 = (mesh.nodes[tr[2]] - mesh.nodes[tr[1]]).norm();
    double e2 = (mesh.nodes[tr[0]] - mesh.nodes[tr[2]]).norm();
    double lo = std::min({e0, e1, e2}), hi = std::max({e0, e1, e2});
    hmax = std::max(hmax, e0 + e1 + e2 - lo - hi);
  }
  mesh.h = hmax;
  return mesh;
}

double mesh_constant_C1(const TriMesh& mesh) {
  double worst = 0.0;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    if (mesh.tri_area(t) <= 0.0) throw std::runtime_error("mesh_constant_C1: degenerate triangle");
    const auto& tr = mesh.tris[t];
    double e[3] = {(mesh.nodes[tr[1]] - mesh.nodes[tr[0]]).norm(),
                   (mesh.nodes[tr[2]] - mesh.nodes[tr[1]]).norm(),
                   (mesh.nodes[tr[0]] - mesh.nodes[tr[2]]).norm()};
    std::sort(e, e + 3);
    double s = e[0], med = e[1], lng = e[2];
    double alpha = s / med;
    double cos_tau = (s * s + med * med - lng * lng) / (2.0 * s * med);
    double cos_2tau = 2.0 * cos_tau * cos_tau - 1.0;
    double root = std::sqrt(1.0 + 2.0 * alpha * alpha * cos_2tau + std::pow(alpha, 4));
    double c = 0.493 * med * (1.0 + alpha * alpha + root) /
               std::sqrt(2.0 * (1.0 + alpha * alpha - root));
    worst = std::max(worst, c);
  }
  return worst / mesh.h;
}

TriMesh morph_mesh(const TriMesh& mesh, const Eigen::VectorXd& displacement) {
  if (displacement.size() != 2 * mesh.n)
    throw std::invalid_argument("morph_mesh: displacement must have 2n entries");
  TriMesh out = mesh;
  for (int v = 0; v < mesh.num_nodes(); ++v) {
    const CoarseTri& c = mesh.coarse[mesh.node_parent[v]];
    Eigen::Vector3d b = barycentric(c, mesh.nodes[v]);
    Vec2 d = Vec2::Zero();
    for (int i = 0; i < 3; ++i) {
      int p = c.corner_vertex[i];
      if (p >= 0) d += b[i] * Vec2(displacement[2 * p], displacement[2 * p + 1]);
    }
    out.nodes[v] += d;
  }
  for (int t = 0; t < out.num_tris(); ++t)
    if (out.tri_area(t) <= 0.0)
      throw std::runtime_error("morph_mesh: step too large, triangle inverted");
  // Hat carriers move with the polygon vertices; the center stays put.
  for (auto& c : out.coarse) {
    for (int i = 0; i < 3; ++i) {
      int p = c.corner_vertex[i];
      if (p >= 0)
        c.corner_pos[i] += Vec2(displacement[2 * p], displacement[2 * p + 1]);
    }
    finalize_coarse(c);
  }
  return out;
}

}  // namespace polyspec
