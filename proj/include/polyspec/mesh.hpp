#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "polyspec/geometry.hpp"

namespace polyspec {

enum class MeshKind {
  SymmetricFan,  // regular polygon, fan from center, exact slices
  EarClipFan     // general polygon, ear clipping + midpoint refinement
};

/// Piecewise-affine carrier triangulation of the vertex hat functions.
/// Corner id -1 marks the fixed center vertex of the symmetric fan.
struct CoarseTri {
  std::array<int, 3> corner_vertex;        // polygon vertex id or -1
  std::array<Vec2, 3> corner_pos;
  std::array<Vec2, 3> bary_grad;           // gradient of each corner's barycentric
  double area;
};

struct SymmetryMaps {
  std::vector<int> rot;   // node -> node under rotation by 2 pi / n
  std::vector<int> refl;  // node -> node under reflection about the x-axis
};

class TriMesh {
 public:
  MeshKind kind;
  int n = 0;  // polygon vertex count
  int m = 0;  // per-slice subdivision (symmetric meshes)
  double h = 0.0;  // median edge length of the reference subdivided triangle

  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> tris;  // CCW
  std::vector<std::uint8_t> node_boundary;
  std::vector<int> tri_parent;   // coarse triangle id; equals the slice index
                                 // for symmetric meshes
  std::vector<int> node_parent;  // one coarse triangle containing the node
  std::vector<CoarseTri> coarse;
  SymmetryMaps sym;  // populated for symmetric meshes only

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_tris() const { return static_cast<int>(tris.size()); }
  double tri_area(int t) const;
  double mesh_area() const;

  /// Value of the vertex hat function phi_p at a node (0 outside support).
  double hat_value(int p, int node) const;
  /// Gradient of phi_p on coarse triangle c (constant there; 0 if unsupported).
  Vec2 hat_grad(int p, int c) const;

  void dump(const std::string& path) const;
};

std::int64_t symmetric_mesh_node_count(int n, int m);

/// Symmetric mesh of the regular n-gon: each fan slice T_j is subdivided into
/// m^2 congruent triangles similar to T_j / m. Node indexing is slice-major in
/// barycentric lattice order, so the symmetry permutations are index
/// arithmetic. h = 1/m.
TriMesh symmetric_mesh(int n, int m);

/// Ear-clipping triangulation of a simple polygon followed by `levels`
/// uniform midpoint refinements. h halves per level.
TriMesh fan_refined_mesh(const Polygon& p, int levels);

/// Mesh-shape interpolation constant: max over triangles of C(T_i) / h with
/// C(T_i) = 0.493 L_i (1 + a^2 + s) / sqrt(2 (1 + a^2 - s)),
/// s = sqrt(1 + 2 a^2 cos(2 tau) + a^4), where L_i is the median edge,
/// a the shortest/median ratio and tau the angle between those two edges.
double mesh_constant_C1(const TriMesh& mesh);

/// Moves every node by sum_i d_i phi_i(x); boundary vertices move exactly by
/// their displacement. Throws if a triangle inverts.
TriMesh morph_mesh(const TriMesh& mesh, const Eigen::VectorXd& displacement);

}  // namespace polyspec
