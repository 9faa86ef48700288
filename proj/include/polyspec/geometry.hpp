#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace polyspec {

using Vec2 = Eigen::Vector2d;

/// Sign of the 2x2 determinant |b-a, c-a|, evaluated exactly on the given
/// doubles. Returns +1 (counter-clockwise), -1 (clockwise) or 0 (collinear).
int orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

/// Simple planar polygon with counter-clockwise vertex order.
///
/// Construction validates all invariants: n >= 3, positive signed area,
/// no zero-length edge and no improper edge intersection (touching
/// configurations count as non-simple).
class Polygon {
 public:
  explicit Polygon(std::vector<Vec2> vertices);

  int size() const { return static_cast<int>(verts_.size()); }
  const Vec2& vertex(int i) const { return verts_[wrap(i)]; }
  const std::vector<Vec2>& vertices() const { return verts_; }

  double area() const;
  double diameter() const;
  double edge_length(int i) const;                // edge i -> i+1
  double interior_angle(int i) const;             // radians
  Polygon scaled(double t) const;
  Polygon displaced(const Eigen::VectorXd& d) const;  // d in R^{2n}

  /// Flat coordinate vector (x0, y0, ..., x_{n-1}, y_{n-1}).
  Eigen::VectorXd coordinates() const;

  void save(const std::string& path) const;
  static Polygon load(const std::string& path);

 private:
  int wrap(int i) const {
    int n = size();
    return ((i % n) + n) % n;
  }
  std::vector<Vec2> verts_;
};

/// Checks simplicity of a closed vertex loop without constructing a Polygon.
/// Adjacent edges may meet only at the shared vertex; any other contact,
/// including touching, fails.
bool is_simple(const std::vector<Vec2>& verts);

/// Regular n-gon inscribed in the unit circle, vertex 0 at (1,0).
Polygon regular_polygon(int n);

double polygon_area(const Polygon& p);

/// Gradient of the area with respect to vertex coordinates; component pair
/// i is (0.5 (y_{i+1} - y_{i-1}), 0.5 (x_{i-1} - x_{i+1})).
Eigen::VectorXd area_gradient(const Polygon& p);

/// Constant 2n x 2n Hessian of the area: blocks B_{i,i+1} = [[0, 1/2], [-1/2, 0]],
/// mirrored below the diagonal, zero elsewhere.
Eigen::MatrixXd area_hessian(int n);

/// The four directions that leave |P| lambda_1(P) invariant at the regular
/// polygon: translations, scaling and the linearized rotation.
struct KernelBasis {
  Eigen::VectorXd tx, ty, s, r;
};

KernelBasis kernel_basis(int n);

}  // namespace polyspec
