#pragma once

#include "rpf/interval_fn.hpp"

namespace rpf {

// The variation cones used throughout: C_a = { f : essinf f > 0 and
// var f <= a * essinf f }, with variation and essential infimum taken over
// the whole base interval.

// var(f) / essinf(f); +infinity when f is not essentially positive.
double cone_ratio(const PiecewiseFn& f);

bool cone_member(const PiecewiseFn& f, double a);

// Hilbert projective distance between f and h inside C_a:
//   tau = max { lambda >= 0 : h - lambda f in C_a }
//   rho = min { mu  >  0   : mu f - h in C_a }
//   theta = log(rho / tau)
// Both extremal problems have concave feasibility in the scalar, so plain
// bisection brackets them.  theta is +infinity when h touches the cone
// boundary (tau == 0) or rho fails to exist.
struct ProjectiveGap {
  double tau = 0.0;
  double rho = 0.0;
  double theta = 0.0;
};

ProjectiveGap hilbert_gap(const PiecewiseFn& f, const PiecewiseFn& h, double a,
                          double rel_tol = 1e-10);

// Diameter of the image cone C_{gamma * a} inside C_a when gamma (a+1) < ...
// finite for gamma in (0,1): 2 log( (1 + gamma (a + 1)) / (1 - gamma) ).
double cone_diameter_bound(double a, double gamma);

// Birkhoff: a map contracting a cone into a part of finite diameter delta
// contracts the projective metric by tanh(delta / 4).
double contraction_factor(double delta);

}  // namespace rpf
