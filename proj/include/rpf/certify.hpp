#pragma once

#include <cstdint>
#include <vector>

#include "rpf/transfer.hpp"

namespace rpf {

// Outcome of the block-length search: the smallest n with
// mean log c_{omega,n} + 2 stderr < 0 over the sampled fibers.
struct ContractionCertificate {
  bool certified = false;
  int n_star = 0;
  double mean_log_c = 0.0;
  double stderr_log_c = 0.0;
  double gamma = 0.0;  // chosen in (exp(mean log c), 1)
  int base_count = 0;
  int spacing = 0;
  // Search trace, one entry per tried block length.
  std::vector<int> tried_n;
  std::vector<double> tried_mean;
  std::vector<double> tried_stderr;
};

ContractionCertificate search_n_star(const System& sys, int n_max,
                                     int base_count, int spacing);

// Fiber cone parameter a at a given fiber: truncation of the backward series
//   a = sum_j gamma^-(j+1) d[-(j+1)] prod_{k=1..j} c[-k],
// blocks of length n_star ending at the fiber.  The recursion
// gamma a(sigma^{n*} omega) = c a(omega) + d holds along the orbit.
struct FiberConeParam {
  double a = 0.0;
  int terms = 0;
  double tail_bound = 0.0;  // geometric-tail estimate from the last ratio
};

FiberConeParam fiber_cone_param(const System& sys,
                                const ContractionCertificate& cert,
                                std::int64_t fiber_index);

// Cone parameters at the consecutive block fibers 0, n*, 2n*, ...; the
// anchors share their backward blocks, so the whole series costs little
// more than a single fiber.  block_log_c/d[k] are the constants of the
// block starting at fiber k n*, which ties a[k] to a[k+1] through
//   gamma a[k+1] = c[k] a[k] + d[k].
struct ConeParamSeries {
  std::vector<std::int64_t> fibers;
  std::vector<double> a;
  std::vector<int> terms;
  std::vector<double> tail_bound;
  std::vector<double> block_log_c;
  std::vector<double> block_log_d;
};

ConeParamSeries cone_param_series(const System& sys,
                                  const ContractionCertificate& cert,
                                  int count);

// log a at fibers 0, n*, 2n*, ...; the fitted slope per unit shift is the
// temperedness diagnostic (should be statistically zero).
struct TemperednessProfile {
  std::vector<std::int64_t> fibers;
  std::vector<double> log_a;
  double slope = 0.0;
};

TemperednessProfile temperedness_profile(const System& sys,
                                         const ContractionCertificate& cert,
                                         int count);

// Subadditive/superadditive limit profiles:
//   beta_f_n   = E[(1/n) log b_f^(n)]           nondecreasing in n
//   phi_minus_n = E[-(1/n) log Einf_X(g^(n))]   nonincreasing in n (reported
//                                               as minus_phi_minus_n)
//   phi_plus   = E[log esssup g]                Birkhoff average
struct KingmanProfile {
  std::vector<int> ns;
  std::vector<double> beta_f_n;
  std::vector<double> beta_stderr;
  std::vector<double> minus_phi_minus_n;
  std::vector<double> phi_stderr;
  double phi_plus = 0.0;
  int base_count = 0;
};

KingmanProfile kingman_profile(const System& sys, int n_max, int base_count,
                               int spacing);

// Closed-form sufficient conditions for strong contraction (each margin
// negative certifies on its own):
//   margin_n1:      E[osc + log 3 + log(1+var/sup) + log(1+2 xi) - log b_f]
//   margin_general: E[osc + log(2+xi) - log b_f]
//   margin_xi:      E[osc] + log xi_hat - E[log b_f]
// with osc = log esssup g - log essinf g per fiber and xi_hat a fitted
// growth factor for xi^(n).
struct SufficientMargins {
  double margin_n1 = 0.0;
  double margin_general = 0.0;
  double margin_xi = 0.0;
  double xi_hat = 1.0;
  bool any_holds = false;
  int base_count = 0;
};

SufficientMargins sufficient_conditions(const System& sys, int base_count,
                                        int spacing);

// Checks the composed-partition bound xi^(n) <= n prod_j (xi_j^(1) + 2) on
// sampled words and fits the growth rate of 1 + xi^(n).
struct XiGrowth {
  std::vector<int> ns;
  std::vector<double> mean_xi;
  bool within_bound = true;
  double growth_rate = 0.0;  // fitted slope of log(1 + xi^(n)) per step
};

XiGrowth xi_growth_check(const System& sys, int n_max, int base_count,
                         int spacing);

}  // namespace rpf
