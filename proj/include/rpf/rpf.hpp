#pragma once

#include <cstdint>
#include <vector>

#include "rpf/transfer.hpp"

namespace rpf {

// Finite-depth realizations of the equivariant density, the conformal
// measure, the multipliers, and the derived quantities (invariant measures,
// Lyapunov exponents, correlation decay, spectral residuals).
//
// All estimators are built from renormalized operator folds.  Quantities
// that the theory ties together through exact identities are computed from
// folds sharing a common terminal fiber, so the identities survive at the
// rounding level rather than holding only up to truncation error.

// Fold f forward from `fiber` over `depth` symbols, renormalizing each step.
NormalizedIterate forward_fold(const System& sys, std::int64_t fiber,
                               int depth, const PiecewiseFn& f);

// --- conformal measure functional -------------------------------------------

// nu_fiber(f) ~ Einf(L^depth f) / Einf(L^depth 1), both folds starting at
// `fiber`.  Nonnegative arguments use the ratio directly; signed arguments
// are shifted by their sup norm first (the functional is linear and maps the
// constant 1 to 1 exactly, so nu(f) = nu(f + c) - c).
class ConformalFunctional {
 public:
  ConformalFunctional(const System& sys, std::int64_t fiber, int depth);

  // f with essinf >= 0.
  double ratio(const PiecewiseFn& f) const;
  // any BV f.
  double operator()(const PiecewiseFn& f) const;

  // absolute log Einf(L^depth 1), the conformal normalizer.
  double log_einf_one() const { return log_einf_one_; }
  std::int64_t fiber() const { return fiber_; }
  int depth() const { return depth_; }

 private:
  const System* sys_;
  std::int64_t fiber_;
  int depth_;
  double log_einf_one_;
};

// --- equivariant density ------------------------------------------------------

struct DensityResult {
  PiecewiseFn density;      // essinf == 1
  double log_scale = 0.0;   // log of the discarded normalization
  double cauchy_gap = 0.0;  // sup distance to the (depth - stride) iterate
  int depth = 0;
};

// q_fiber ~ normalized L^(depth) 1 pulled from fiber - depth.  `stride`
// controls the Cauchy diagnostic: the gap compares against the anchor moved
// `stride` fibers closer.
DensityResult equivariant_density(const System& sys, std::int64_t fiber,
                                  int depth, int stride = 1);

// --- multipliers --------------------------------------------------------------

// Folds of 1 from fibers first .. first+count, all ending at the common
// terminal fiber first + count + tail_depth.  Adjacent entries then share
// every operation past the first symbol, and
//   lambda_plus[j] = Einf(F_j) / Einf(F_{j+1})
// realizes nu_{sigma w}(L_w 1) with the truncation errors aligned.
struct MultiplierLadder {
  std::int64_t first = 0;
  int count = 0;
  int tail_depth = 0;
  std::vector<double> log_einf;     // count + 1 entries, absolute logs
  std::vector<double> lambda_plus;  // count entries
};

MultiplierLadder multiplier_ladder(const System& sys, std::int64_t first,
                                   int count, int tail_depth);

// --- density chain ------------------------------------------------------------

// Pushforward chain: the density at `first` comes from a backward fold of
// depth `anchor_depth`; successive densities are exact operator images,
//   q_{j+1} = L_j q_j / lambda_minus_j,  lambda_minus_j = Einf(L_j q_j),
// so the equivariance equation holds by construction and the lambda_minus
// sequence is the density-side multiplier estimate.
class FiberChain {
 public:
  FiberChain(const System& sys, std::int64_t first, int length,
             int anchor_depth);

  const PiecewiseFn& density(std::int64_t fiber) const;
  double lambda_minus(std::int64_t fiber) const;
  // sum of log lambda_minus over fibers [from, to)
  double log_lambda_sum(std::int64_t from, std::int64_t to) const;

  std::int64_t first() const { return first_; }
  int length() const { return length_; }
  int anchor_depth() const { return anchor_depth_; }

 private:
  std::int64_t first_;
  int length_;
  int anchor_depth_;
  std::vector<PiecewiseFn> densities_;      // fibers first .. first+length
  std::vector<double> log_lambda_minus_;    // length entries
};

// --- duality of the two multiplier estimates ----------------------------------

// nu_j(q_j) * lambda_plus_j / (nu_{j+1}(q_{j+1}) * lambda_minus_j) should be
// 1; the residual measures the internal consistency of the four estimators.
struct DualityRow {
  std::int64_t fiber = 0;
  double nu_q = 0.0;        // nu_fiber(q_fiber)
  double nu_q_next = 0.0;   // nu_{fiber+1}(q_{fiber+1})
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double ratio = 0.0;
};

std::vector<DualityRow> duality_check(const System& sys, std::int64_t first,
                                      int count, int depth, int anchor_depth);

// --- invariant measure ----------------------------------------------------------

// mu_fiber(f) = nu(f * q) / nu(q), with both numerator and denominator
// evaluated through the same functional.
double invariant_measure_eval(const System& sys,
                              const ConformalFunctional& nu,
                              const PiecewiseFn& density,
                              const PiecewiseFn& f);

// f o T_symbol on the full base interval (branch tiling, hole ignored).
// Exact when both the branch and the overlapped piece are affine.
PiecewiseFn compose_with_map(const System& sys, int symbol,
                             const PiecewiseFn& f);

// --- conformal measure table -----------------------------------------------------

// CDF of nu_fiber on a uniform grid: cdf[k] = nu([lo, lo + k*h]).
struct NuTable {
  std::int64_t fiber = 0;
  int depth = 0;
  int cells = 0;
  Interval base{0.0, 1.0};
  std::vector<double> cdf;  // cells + 1 entries, cdf[0] = 0

  double cell_mass(int k) const { return cdf[k + 1] - cdf[k]; }
};

NuTable nu_table(const System& sys, std::int64_t fiber, int depth, int cells);

// Midpoint integration of f against the table's cell masses.
double nu_integrate(const NuTable& table, const PiecewiseFn& f);

// --- Lyapunov exponents -----------------------------------------------------------

struct LyapunovEstimate {
  int n = 0;
  int base_count = 0;
  double einf_mean = 0.0;  // (1/n) log Einf L^n 1, averaged over base points
  double einf_stderr = 0.0;
  double bv_mean = 0.0;    // (1/n) log ||L^n 1||_BV
  double bv_stderr = 0.0;
  std::vector<double> einf_samples;
  std::vector<double> bv_samples;
};

LyapunovEstimate lyapunov_exponent(const System& sys, int n, int base_count,
                                   int spacing = 0);

// --- correlation decay --------------------------------------------------------------

struct CorrelationPoint {
  int n = 0;
  double cov = 0.0;
};

struct CorrelationResult {
  std::vector<CorrelationPoint> points;
  double rate = 0.0;      // per-step decay factor exp(fit slope)
  double fit_corr = 0.0;  // correlation coefficient of the log-linear fit
  int fit_points = 0;
};

// Cov_n between h at fiber `fiber - n` and f at `fiber`:
//   nu(f * (L^n(h q_{fiber-n}) / Lambda_n - mu_{-n}(h) q_fiber)) / nu(q_fiber),
// with the mean of h deflated through the same operator fold so the product
// term cancels at finite depth instead of only in the limit.
CorrelationResult correlation_decay(const System& sys, std::int64_t fiber,
                                    int depth, const PiecewiseFn& f,
                                    const PiecewiseFn& h, int n_max);

// --- spectral residual ----------------------------------------------------------------

// Q^(n) f = L^(n) f / Lambda_n - nu_fiber(f) * psi_{fiber+n}, the part of the
// fold orthogonal to the leading direction; psi = q / nu(q).
struct ResidualPoint {
  int n = 0;
  double sup_norm = 0.0;
};

struct ResidualResult {
  std::vector<ResidualPoint> points;
  double rate = 0.0;       // per-step factor exp(fit slope)
  double log_slope = 0.0;  // fit slope of log sup_norm vs n
  double fit_corr = 0.0;
  int fit_points = 0;
};

ResidualResult rpf_residual(const System& sys, std::int64_t fiber,
                            const PiecewiseFn& f, int n_max, int depth);

// Same quantity for f = psi_fiber itself, where the fold telescopes through
// the density chain; returns sup norms of Q^(n) psi per n.
ResidualResult rpf_residual_psi(const System& sys, std::int64_t fiber,
                                int n_max, int depth);

}  // namespace rpf
