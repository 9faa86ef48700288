#include "polyspec/interval.hpp"

namespace polyspec {

namespace {

// Monotone pieces of sin/cos are separated by critical points k*pi/2.
// Hull the endpoint images and the +-1 extrema reached inside the interval.
Interval eval_trig(const Interval& a, double (*f)(double), double crit_offset) {
  if (std::abs(a.lo()) > 4.0 * M_PI || std::abs(a.hi()) > 4.0 * M_PI)
    throw std::domain_error("Interval trig: argument out of supported range");
  double flo = f(a.lo());
  double fhi = f(a.hi());
  double lo = std::min(flo, fhi), hi = std::max(flo, fhi);
  // Extrema of sin at pi/2 + k pi, of cos at k pi.
  double k0 = std::ceil((a.lo() - crit_offset) / M_PI - 0.5);
  for (double k = k0; crit_offset + k * M_PI <= a.hi() + 1e-15; k += 1.0) {
    double x = crit_offset + k * M_PI;
    if (x < a.lo() - 1e-15) continue;
    double v = f(x);
    lo = std::min(lo, v < 0.0 ? -1.0 : v);
    hi = std::max(hi, v > 0.0 ? 1.0 : v);
  }
  lo = std::max(-1.0, detail::down4(lo));
  hi = std::min(1.0, detail::up4(hi));
  return Interval(lo, hi);
}

}  // namespace

Interval sin(const Interval& a) { return eval_trig(a, std::sin, M_PI / 2.0); }

Interval cos(const Interval& a) { return eval_trig(a, std::cos, 0.0); }

}  // namespace polyspec
