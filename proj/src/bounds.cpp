#include "polyspec/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace polyspec {

SurgeryConstants surgery_constants(double K, int n) {
  if (K <= 0.0) throw std::invalid_argument("surgery_constants: K must be positive");
  if (n < 3) throw std::invalid_argument("surgery_constants: n must be >= 3");
  SurgeryConstants sc;
  sc.n = n;
  Interval pi = interval_pi();
  Interval two(2.0), one(1.0);
  Interval log2 = log(Interval(2.0));
  Interval factor = two * pi * (Interval(8.0) + Interval(12.0) * log2) *
                    exp(one / (Interval(4.0) * pi)) * sqr(Interval(K));
  sc.c = one / factor;

  // C0 (C0 + 1) = c  =>  C0 = (-1 + sqrt(1 + 4 c)) / 2.
  sc.c0 = (sqrt(one + Interval(4.0) * sc.c) - one) / two;
  sc.r0 = sc.c0;

  Interval inv16c04 = one / (Interval(16.0) * powi(sc.c0, 4));
  sc.k = static_cast<long long>(std::floor(inv16c04.lo())) + 1;
  if (std::floor(inv16c04.lo()) != std::floor(inv16c04.hi()))
    throw std::runtime_error("surgery_constants: floor(1/(16 C0^4)) not determined");

  // Largest power of two with 2 sqrt(2) sqrt(e) < C0^2 certified in interval
  // arithmetic, then halved once for margin.
  Interval limit = sqr(sc.c0) / (two * sqrt(two));  // sqrt(e*) must stay below this
  double e_max = limit.lo() * limit.lo();
  double e_dyadic = std::pow(2.0, std::floor(std::log2(e_max)) + 1.0);
  while ((two * sqrt(two) * sqrt(Interval(e_dyadic))).hi() >= sqr(sc.c0).lo()) e_dyadic *= 0.5;
  sc.e_star = Interval(e_dyadic * 0.5);
  sc.d_star = pi / sc.e_star;
  sc.d_max = two * sc.d_star + Interval(static_cast<double>(sc.k + n - 2)) * Interval(8.0) * sc.c0;
  return sc;
}

double inradius_min(double l_star_upper, double area) {
  if (l_star_upper <= 0.0 || area <= 0.0)
    throw std::invalid_argument("inradius_min: inputs must be positive");
  return std::sqrt(area / (4.0 * l_star_upper));
}

double lambda_lipschitz(double lambda_p, double lambda_q, double lambda_cap, double delta) {
  if (lambda_p <= 0.0 || lambda_q <= 0.0 || lambda_cap <= 0.0 || delta < 0.0)
    throw std::invalid_argument("lambda_lipschitz: inputs must be positive");
  double lmax = std::max(lambda_p, lambda_q);
  return 4.0 * std::sqrt(2.0) * M_PI * std::exp(1.0 / (4.0 * M_PI)) * lmax * lmax * lambda_cap *
         std::sqrt(delta);
}

double min_edge_threshold(double l_star_prev, double l_star, double C) {
  if (l_star_prev <= l_star) throw std::invalid_argument("min_edge_threshold: gap must be positive");
  if (C <= 0.0) throw std::invalid_argument("min_edge_threshold: C must be positive");
  double gap = (l_star_prev - l_star) / C;
  return gap * gap;
}

double covering_plan_log10(double d_max, double delta, int n) {
  if (d_max <= 0.0 || delta <= 0.0) throw std::invalid_argument("covering_plan: positive inputs");
  if (n < 3) throw std::invalid_argument("covering_plan: n must be >= 3");
  double dim = 2.0 * n - 4.0;
  double log_count = dim * (std::log10(d_max / delta) +
                            std::log10(std::sqrt(dim) * d_max / (2.0 * delta)));
  return log_count;
}

}  // namespace polyspec
