#include "polyspec/geometry.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace polyspec {

namespace {

// Error-free transformations. two_sum/two_prod are exact: the returned pair
// (s, e) satisfies s + e == a op b in real arithmetic.
struct Pair {
  double s, e;
};

inline Pair two_sum(double a, double b) {
  double s = a + b;
  double bv = s - a;
  double av = s - bv;
  return {s, (a - av) + (b - bv)};
}

inline Pair two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

// Adds one double to a nonoverlapping expansion, keeping it nonoverlapping.
inline void grow_expansion(std::vector<double>& e, double b) {
  double q = b;
  for (double& ei : e) {
    Pair t = two_sum(q, ei);
    ei = t.e;
    q = t.s;
  }
  e.push_back(q);
}

inline int expansion_sign(const std::vector<double>& e) {
  // Largest-magnitude component is last and dominates the rest.
  for (auto it = e.rbegin(); it != e.rend(); ++it) {
    if (*it > 0.0) return 1;
    if (*it < 0.0) return -1;
  }
  return 0;
}

inline bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  // Assumes p collinear with [a, b].
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

// Do the closed segments [p1,p2] and [q1,q2] share any point?
bool segments_touch(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  int d1 = orient2d(q1, q2, p1);
  int d2 = orient2d(q1, q2, p2);
  int d3 = orient2d(p1, p2, q1);
  int d4 = orient2d(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(p1, q1, q2)) return true;
  if (d2 == 0 && on_segment(p2, q1, q2)) return true;
  if (d3 == 0 && on_segment(q1, p1, p2)) return true;
  if (d4 == 0 && on_segment(q2, p1, p2)) return true;
  return false;
}

}  // namespace

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  double acx = a.x() - c.x();
  double bcx = b.x() - c.x();
  double acy = a.y() - c.y();
  double bcy = b.y() - c.y();
  double det = acx * bcy - acy * bcx;
  double detsum = std::abs(acx * bcy) + std::abs(acy * bcx);
  // Filter constant from the forward error of the fast path.
  constexpr double kErr = 4.0 * 0x1p-52;
  if (std::abs(det) > kErr * detsum) return det > 0.0 ? 1 : -1;

  // Exact path: expand every term of
  //   (bx-ax)(cy-ay) - (by-ay)(cx-ax)
  // into an exact expansion and take the sign.
  Pair dx1 = two_sum(b.x(), -a.x());
  Pair dy1 = two_sum(c.y(), -a.y());
  Pair dy2 = two_sum(b.y(), -a.y());
  Pair dx2 = two_sum(c.x(), -a.x());
  std::vector<double> e;
  e.reserve(16);
  auto accumulate_product = [&e](const Pair& u, const Pair& v, double sign) {
    const double us[2] = {u.s, u.e};
    const double vs[2] = {v.s, v.e};
    for (double uu : us)
      for (double vv : vs) {
        Pair p = two_prod(uu, sign * vv);
        grow_expansion(e, p.s);
        if (p.e != 0.0) grow_expansion(e, p.e);
      }
  };
  accumulate_product(dx1, dy1, 1.0);
  accumulate_product(dy2, dx2, -1.0);
  return expansion_sign(e);
}

bool is_simple(const std::vector<Vec2>& verts) {
  int n = static_cast<int>(verts.size());
  if (n < 3) return false;
  for (int i = 0; i < n; ++i)
    if (verts[i] == verts[(i + 1) % n]) return false;

  for (int i = 0; i < n; ++i) {
    const Vec2& p1 = verts[i];
    const Vec2& p2 = verts[(i + 1) % n];
    for (int j = i + 1; j < n; ++j) {
      const Vec2& q1 = verts[j];
      const Vec2& q2 = verts[(j + 1) % n];
      bool share_p2 = (i + 1) % n == j;
      bool share_p1 = (j + 1) % n == i;
      if (share_p2 && share_p1) continue;  // n == 2 loop, excluded above
      if (share_p2) {
        // Consecutive edges meeting at p2 == q1: reject a fold-back spike.
        if (orient2d(p2, p1, q2) == 0 && (p1 - p2).dot(q2 - p2) > 0.0) return false;
        continue;
      }
      if (share_p1) {
        if (orient2d(p1, p2, q1) == 0 && (p2 - p1).dot(q1 - p1) > 0.0) return false;
        continue;
      }
      if (segments_touch(p1, p2, q1, q2)) return false;
    }
  }
  return true;
}

Polygon::Polygon(std::vector<Vec2> vertices) : verts_(std::move(vertices)) {
  int n = static_cast<int>(verts_.size());
  if (n < 3) throw std::invalid_argument("Polygon: need at least 3 vertices");
  for (int i = 0; i < n; ++i)
    if (verts_[i] == verts_[(i + 1) % n])
      throw std::invalid_argument("Polygon: zero-length edge");
  if (!is_simple(verts_)) throw std::invalid_argument("Polygon: not simple");
  if (area() <= 0.0) throw std::invalid_argument("Polygon: orientation must be CCW");
}

double Polygon::area() const {
  double a = 0.0;
  int n = size();
  for (int i = 0; i < n; ++i) {
    const Vec2& p = verts_[i];
    const Vec2& q = verts_[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

double Polygon::diameter() const {
  double d = 0.0;
  int n = size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d = std::max(d, (verts_[i] - verts_[j]).norm());
  return d;
}

double Polygon::edge_length(int i) const { return (vertex(i + 1) - vertex(i)).norm(); }

double Polygon::interior_angle(int i) const {
  Vec2 u = vertex(i - 1) - vertex(i);
  Vec2 v = vertex(i + 1) - vertex(i);
  double ang = std::atan2(u.x() * v.y() - u.y() * v.x(), u.dot(v));
  if (ang < 0.0) ang += 2.0 * M_PI;
  return ang;
}

Polygon Polygon::scaled(double t) const {
  std::vector<Vec2> v(verts_);
  for (auto& p : v) p *= t;
  return Polygon(std::move(v));
}

Polygon Polygon::displaced(const Eigen::VectorXd& d) const {
  int n = size();
  if (d.size() != 2 * n) throw std::invalid_argument("displaced: bad dimension");
  std::vector<Vec2> v(verts_);
  for (int i = 0; i < n; ++i) v[i] += Vec2(d[2 * i], d[2 * i + 1]);
  return Polygon(std::move(v));
}

Eigen::VectorXd Polygon::coordinates() const {
  int n = size();
  Eigen::VectorXd x(2 * n);
  for (int i = 0; i < n; ++i) {
    x[2 * i] = verts_[i].x();
    x[2 * i + 1] = verts_[i].y();
  }
  return x;
}

void Polygon::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("Polygon::save: cannot open " + path);
  out.precision(17);
  for (const auto& v : verts_) out << v.x() << " " << v.y() << "\n";
}

Polygon Polygon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("Polygon::load: cannot open " + path);
  std::vector<Vec2> verts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double x, y;
    if (!(ls >> x >> y)) throw std::runtime_error("Polygon::load: bad line: " + line);
    verts.emplace_back(x, y);
  }
  return Polygon(std::move(verts));
}

Polygon regular_polygon(int n) {
  if (n < 3) throw std::invalid_argument("regular_polygon: n must be >= 3");
  std::vector<Vec2> verts(n);
  double theta = 2.0 * M_PI / n;
  for (int j = 0; j < n; ++j) verts[j] = Vec2(std::cos(j * theta), std::sin(j * theta));
  return Polygon(std::move(verts));
}

double polygon_area(const Polygon& p) { return p.area(); }

Eigen::VectorXd area_gradient(const Polygon& p) {
  int n = p.size();
  Eigen::VectorXd g(2 * n);
  for (int i = 0; i < n; ++i) {
    g[2 * i] = 0.5 * (p.vertex(i + 1).y() - p.vertex(i - 1).y());
    g[2 * i + 1] = 0.5 * (p.vertex(i - 1).x() - p.vertex(i + 1).x());
  }
  return g;
}

Eigen::MatrixXd area_hessian(int n) {
  if (n < 3) throw std::invalid_argument("area_hessian: n must be >= 3");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    h(2 * i, 2 * j + 1) = 0.5;
    h(2 * i + 1, 2 * j) = -0.5;
    h(2 * j + 1, 2 * i) = 0.5;
    h(2 * j, 2 * i + 1) = -0.5;
  }
  return h;
}

KernelBasis kernel_basis(int n) {
  if (n < 3) throw std::invalid_argument("kernel_basis: n must be >= 3");
  KernelBasis kb;
  kb.tx = Eigen::VectorXd::Zero(2 * n);
  kb.ty = Eigen::VectorXd::Zero(2 * n);
  kb.s = Eigen::VectorXd::Zero(2 * n);
  kb.r = Eigen::VectorXd::Zero(2 * n);
  double theta = 2.0 * M_PI / n;
  for (int j = 0; j < n; ++j) {
    kb.tx[2 * j] = 1.0;
    kb.ty[2 * j + 1] = 1.0;
    kb.s[2 * j] = std::cos(j * theta);
    kb.s[2 * j + 1] = std::sin(j * theta);
    kb.r[2 * j] = std::sin(j * theta);
    kb.r[2 * j + 1] = -std::cos(j * theta);
  }
  return kb;
}

}  // namespace polyspec
