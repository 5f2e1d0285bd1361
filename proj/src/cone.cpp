#include "rpf/cone.hpp"

#include <cmath>
#include <limits>

namespace rpf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// a * essinf(h - lambda f) - var(h - lambda f), the cone-membership margin.
// Concave in lambda: the first term is an infimum of affine functions, the
// second a supremum of convex ones.
double margin(const PiecewiseFn& f, const PiecewiseFn& h, double a,
              double lambda, int sign) {
  // sign=+1 checks h - lambda f, sign=-1 checks lambda f - h.
  const PiecewiseFn d = sign > 0 ? combine(1.0, h, -lambda, f)
                                 : combine(lambda, f, -1.0, h);
  const double inf = essinf(d);
  if (!(inf > 0.0)) return -kInf;
  return a * inf - variation(d);
}

}  // namespace

double cone_ratio(const PiecewiseFn& f) {
  const double inf = essinf(f);
  if (!(inf > 0.0)) return kInf;
  return variation(f) / inf;
}

bool cone_member(const PiecewiseFn& f, double a) { return cone_ratio(f) <= a; }

ProjectiveGap hilbert_gap(const PiecewiseFn& f, const PiecewiseFn& h, double a,
                          double rel_tol) {
  if (!(a > 0.0)) fail_schema("cone parameter must be positive");
  if (!cone_member(f, a) || !cone_member(h, a))
    fail_numeric("projective distance undefined: argument left the cone");

  const double inf_f = essinf(f);
  const double sup_h = esssup(h);
  const double scale = sup_h / inf_f;  // > 0

  // tau: largest feasible lambda, bisect with lo feasible, hi infeasible.
  double lo = 0.0;
  double hi = scale * (1.0 + a) + 1.0;
  int guard = 0;
  while (margin(f, h, a, hi, +1) >= 0.0) {
    hi *= 2.0;
    if (++guard > 200) fail_numeric("tau bracket failed to close");
  }
  while (hi - lo > rel_tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (margin(f, h, a, mid, +1) >= 0.0) lo = mid; else hi = mid;
  }
  const double tau = lo;

  // rho: smallest feasible mu, bisect with hi feasible, lo infeasible.
  double rlo = 0.0;
  double rhi = scale * (1.0 + a) + 1.0;
  guard = 0;
  while (margin(f, h, a, rhi, -1) < 0.0) {
    rhi *= 2.0;
    if (++guard > 200)
      fail_numeric("rho bracket failed to close: comparison function sits on "
                   "the cone boundary");
  }
  while (rhi - rlo > rel_tol * std::max(1.0, rhi)) {
    const double mid = 0.5 * (rlo + rhi);
    if (margin(f, h, a, mid, -1) >= 0.0) rhi = mid; else rlo = mid;
  }
  const double rho = rhi;

  ProjectiveGap out;
  out.tau = tau;
  out.rho = rho;
  out.theta = (tau > 0.0 && std::isfinite(rho)) ? std::log(rho / tau) : kInf;
  return out;
}

double cone_diameter_bound(double a, double gamma) {
  if (!(a > 0.0)) fail_schema("cone parameter must be positive");
  if (!(gamma > 0.0 && gamma < 1.0))
    fail_numeric("diameter bound needs a contraction ratio in (0,1)");
  return 2.0 * std::log((1.0 + gamma * (a + 1.0)) / (1.0 - gamma));
}

double contraction_factor(double delta) {
  if (!(delta > 0.0)) fail_numeric("cone diameter must be positive");
  return std::tanh(delta / 4.0);
}

}  // namespace rpf
