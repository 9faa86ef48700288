#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace polyspec {

namespace detail {
inline double up(double x) {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}
inline double down(double x) {
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}
// Wider inflation for libm calls that are not correctly rounded.
inline double up4(double x) { return up(up(up(up(x)))); }
inline double down4(double x) { return down(down(down(down(x)))); }
}  // namespace detail

/// Closed real interval with outward rounding. Every operation returns an
/// enclosure of the exact real result; each primitive inflates its endpoints
/// outward by one ulp (four ulps after library transcendentals).
class Interval {
 public:
  Interval() : lo_(0.0), hi_(0.0) {}
  Interval(double v) : lo_(v), hi_(v) {}  // exact point interval
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo_ <= hi_)) throw std::invalid_argument("Interval: lo > hi");
  }

  static Interval from_midrad(double mid, double rad) {
    return Interval(detail::down(mid - rad), detail::up(mid + rad));
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mid() const { return 0.5 * (lo_ + hi_); }
  double width() const { return hi_ - lo_; }
  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains_zero() const { return contains(0.0); }
  bool strictly_positive() const { return lo_ > 0.0; }

  Interval operator-() const { return Interval(-hi_, -lo_); }

  friend Interval operator+(const Interval& a, const Interval& b) {
    return Interval(detail::down(a.lo_ + b.lo_), detail::up(a.hi_ + b.hi_));
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    return Interval(detail::down(a.lo_ - b.hi_), detail::up(a.hi_ - b.lo_));
  }
  friend Interval operator*(const Interval& a, const Interval& b) {
    double p1 = a.lo_ * b.lo_, p2 = a.lo_ * b.hi_;
    double p3 = a.hi_ * b.lo_, p4 = a.hi_ * b.hi_;
    return Interval(detail::down(std::min({p1, p2, p3, p4})),
                    detail::up(std::max({p1, p2, p3, p4})));
  }
  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw std::domain_error("Interval: division by interval containing 0");
    double p1 = a.lo_ / b.lo_, p2 = a.lo_ / b.hi_;
    double p3 = a.hi_ / b.lo_, p4 = a.hi_ / b.hi_;
    return Interval(detail::down(std::min({p1, p2, p3, p4})),
                    detail::up(std::max({p1, p2, p3, p4})));
  }
  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }
  Interval& operator/=(const Interval& o) { return *this = *this / o; }

 private:
  double lo_, hi_;
};

inline Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

inline Interval abs(const Interval& a) {
  if (a.lo() >= 0.0) return a;
  if (a.hi() <= 0.0) return -a;
  return Interval(0.0, std::max(-a.lo(), a.hi()));
}

inline Interval sqr(const Interval& a) {
  Interval m = abs(a);
  return Interval(detail::down(m.lo() * m.lo()), detail::up(m.hi() * m.hi()));
}

inline Interval sqrt(const Interval& a) {
  if (a.lo() < 0.0) throw std::domain_error("Interval: sqrt of negative interval");
  // IEEE sqrt is correctly rounded; one ulp suffices.
  return Interval(std::max(0.0, detail::down(std::sqrt(a.lo()))), detail::up(std::sqrt(a.hi())));
}

inline Interval exp(const Interval& a) {
  return Interval(std::max(0.0, detail::down4(std::exp(a.lo()))), detail::up4(std::exp(a.hi())));
}

inline Interval log(const Interval& a) {
  if (a.lo() <= 0.0) throw std::domain_error("Interval: log needs positive interval");
  return Interval(detail::down4(std::log(a.lo())), detail::up4(std::log(a.hi())));
}

/// a^p for a > 0 and arbitrary real exponent interval, via exp(p log a).
inline Interval pow(const Interval& a, const Interval& p) {
  return exp(p * log(a));
}

inline Interval pow(const Interval& a, double p) { return pow(a, Interval(p)); }

/// Integer powers, valid for any sign of the base.
inline Interval powi(const Interval& a, int k) {
  if (k < 0) return Interval(1.0) / powi(a, -k);
  Interval r(1.0);
  Interval base = a;
  while (k > 0) {
    if (k & 1) r *= base;
    base = sqr(base);
    k >>= 1;
  }
  return r;
}

inline const Interval& interval_pi() {
  static const Interval pi(M_PI, detail::up(M_PI));
  return pi;
}

/// sin/cos on |x| <= 2 pi; endpoint images hulled with critical values.
Interval sin(const Interval& a);
Interval cos(const Interval& a);

}  // namespace polyspec
