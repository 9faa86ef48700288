#pragma once

#include "polyspec/interval.hpp"

namespace polyspec {

/// Constants of the strip-surgery diameter bound. All fields are certified
/// enclosures of the defining formulas.
struct SurgeryConstants {
  Interval c;       // 1 / (2 pi (8 + 12 log 2) e^{1/(4 pi)} K^2)
  Interval c0;      // positive root of C0 (C0 + 1) = c
  Interval r0;      // = C0
  long long k = 0;  // floor(1 / (16 C0^4)) + 1
  Interval e_star;  // largest dyadic with 2 sqrt(2) sqrt(e*) < C0^2, halved once
  Interval d_star;  // pi / e*
  Interval d_max;   // 2 d* + (k + n - 2) 8 C0
  int n = 0;
};

SurgeryConstants surgery_constants(double K, int n);

/// Makai threshold: an n-gon of the given area whose inradius is below the
/// returned value cannot have |P| lambda_1(P) below l_star_upper.
double inradius_min(double l_star_upper, double area);

/// Lipschitz bound 4 sqrt(2) pi e^{1/(4 pi)} max(lambda_P, lambda_Q)^2
/// lambda_cap delta^{1/2} on the eigenvalue drift under a vertex
/// perturbation of size delta.
double lambda_lipschitz(double lambda_p, double lambda_q, double lambda_cap, double delta);

/// delta_0 = ((l_star_prev - l_star) / C)^2; edges shorter than delta_0 are
/// excluded for optimal polygons.
double min_edge_threshold(double l_star_prev, double l_star, double C);

/// log10 of the ball count c_{2n-4} (D_max / delta)^{2n-4} with the crude
/// c_{2n-4} = (sqrt(2n-4) D_max / (2 delta))^{2n-4}.
double covering_plan_log10(double d_max, double delta, int n);

}  // namespace polyspec
