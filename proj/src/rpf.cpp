#include "rpf/rpf.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <variant>

#include "rpf/common.hpp"

namespace rpf {

namespace {

// Absolute log of the essential infimum of a renormalized iterate; the fold
// must have stayed positive for the estimators below to make sense.
double log_einf(const NormalizedIterate& it, const char* what) {
  const double lo = essinf(it.fn);
  if (!(lo > 0.0))
    fail_numeric(std::string(what) +
                 ": fold lost positivity (no full cylinder at this depth?)");
  return it.log_scale + std::log(lo);
}

Side flip(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

}  // namespace

NormalizedIterate forward_fold(const System& sys, std::int64_t fiber,
                               int depth, const PiecewiseFn& f) {
  if (depth < 0) fail_assumption("forward_fold: negative depth");
  NormalizedIterate it = normalized(f);
  for (int j = 0; j < depth; ++j)
    it = apply_normalized(sys, sys.driver.symbol_at(fiber + j), it);
  return it;
}

// --- conformal measure functional -------------------------------------------

ConformalFunctional::ConformalFunctional(const System& sys, std::int64_t fiber,
                                         int depth)
    : sys_(&sys), fiber_(fiber), depth_(depth) {
  if (depth < 1) fail_assumption("conformal functional: depth must be >= 1");
  const auto one = forward_fold(sys, fiber, depth,
                                PiecewiseFn::constant(sys.family.base, 1.0));
  log_einf_one_ = log_einf(one, "conformal normalizer");
}

double ConformalFunctional::ratio(const PiecewiseFn& f) const {
  const double lo = essinf(f);
  if (lo < 0.0)
    fail_assumption("conformal ratio needs a nonnegative argument");
  const auto it = forward_fold(*sys_, fiber_, depth_, f);
  const double flo = essinf(it.fn);
  if (!(flo > 0.0)) return 0.0;  // mass below the resolvable scale
  return std::exp(it.log_scale + std::log(flo) - log_einf_one_);
}

double ConformalFunctional::operator()(const PiecewiseFn& f) const {
  const double lo = essinf(f);
  if (lo > 0.0) return ratio(f);
  // Shift into the positive cone; the functional maps constants to
  // themselves, so the shift cancels up to truncation error.
  const double c = std::max(std::abs(lo), std::abs(esssup(f))) + 1.0;
  const auto shifted =
      combine(1.0, f, c, PiecewiseFn::constant(f.base(), 1.0));
  return ratio(shifted) - c;
}

// --- equivariant density ------------------------------------------------------

DensityResult equivariant_density(const System& sys, std::int64_t fiber,
                                  int depth, int stride) {
  if (depth < 1) fail_assumption("density: depth must be >= 1");
  if (stride < 1 || stride > depth)
    fail_assumption("density: stride must lie in [1, depth]");
  const PiecewiseFn one = PiecewiseFn::constant(sys.family.base, 1.0);

  const auto full = forward_fold(sys, fiber - depth, depth, one);
  const double lo = essinf(full.fn);
  if (!(lo > 0.0))
    fail_numeric("density fold lost positivity; the anchored word has no "
                 "full cylinder at this depth");

  DensityResult out;
  out.density = scaled(full.fn, 1.0 / lo);
  out.log_scale = full.log_scale + std::log(lo);
  out.depth = depth;

  const auto shorter =
      forward_fold(sys, fiber - (depth - stride), depth - stride, one);
  const double slo = essinf(shorter.fn);
  if (slo > 0.0)
    out.cauchy_gap = sup_distance(out.density, scaled(shorter.fn, 1.0 / slo));
  else
    out.cauchy_gap = std::numeric_limits<double>::infinity();
  return out;
}

// --- multipliers ----------------------------------------------------------------

MultiplierLadder multiplier_ladder(const System& sys, std::int64_t first,
                                   int count, int tail_depth) {
  if (count < 1) fail_assumption("multiplier ladder: count must be >= 1");
  if (tail_depth < 1)
    fail_assumption("multiplier ladder: tail depth must be >= 1");
  MultiplierLadder out;
  out.first = first;
  out.count = count;
  out.tail_depth = tail_depth;
  out.log_einf.resize(static_cast<std::size_t>(count) + 1);
  const PiecewiseFn one = PiecewiseFn::constant(sys.family.base, 1.0);
  for (int j = 0; j <= count; ++j) {
    const int depth = count - j + tail_depth;
    const auto it = forward_fold(sys, first + j, depth, one);
    out.log_einf[static_cast<std::size_t>(j)] =
        log_einf(it, "multiplier ladder");
  }
  out.lambda_plus.resize(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const auto k = static_cast<std::size_t>(j);
    out.lambda_plus[k] = std::exp(out.log_einf[k] - out.log_einf[k + 1]);
  }
  return out;
}

// --- density chain ---------------------------------------------------------------

FiberChain::FiberChain(const System& sys, std::int64_t first, int length,
                       int anchor_depth)
    : first_(first), length_(length), anchor_depth_(anchor_depth) {
  if (length < 0) fail_assumption("fiber chain: negative length");
  if (anchor_depth < 1) fail_assumption("fiber chain: anchor depth < 1");
  const auto anchored =
      forward_fold(sys, first - anchor_depth, anchor_depth,
                   PiecewiseFn::constant(sys.family.base, 1.0));
  const double lo = essinf(anchored.fn);
  if (!(lo > 0.0))
    fail_numeric("chain anchor fold lost positivity; the anchored word has "
                 "no full cylinder at this depth");
  densities_.reserve(static_cast<std::size_t>(length) + 1);
  densities_.push_back(scaled(anchored.fn, 1.0 / lo));
  log_lambda_minus_.reserve(static_cast<std::size_t>(length));
  for (int j = 0; j < length; ++j) {
    const int symbol = sys.driver.symbol_at(first + j);
    PiecewiseFn image = apply_transfer(sys, symbol, densities_.back());
    const double lam = essinf(image);
    if (!(lam > 0.0))
      fail_numeric("density pushforward lost positivity along the chain");
    log_lambda_minus_.push_back(std::log(lam));
    densities_.push_back(scaled(image, 1.0 / lam));
  }
}

const PiecewiseFn& FiberChain::density(std::int64_t fiber) const {
  if (fiber < first_ || fiber > first_ + length_)
    fail_assumption("fiber chain: fiber outside the constructed range");
  return densities_[static_cast<std::size_t>(fiber - first_)];
}

double FiberChain::lambda_minus(std::int64_t fiber) const {
  if (fiber < first_ || fiber >= first_ + length_)
    fail_assumption("fiber chain: multiplier outside the constructed range");
  return std::exp(log_lambda_minus_[static_cast<std::size_t>(fiber - first_)]);
}

double FiberChain::log_lambda_sum(std::int64_t from, std::int64_t to) const {
  if (from < first_ || to > first_ + length_ || from > to)
    fail_assumption("fiber chain: multiplier range outside the chain");
  double acc = 0.0;
  for (std::int64_t j = from; j < to; ++j)
    acc += log_lambda_minus_[static_cast<std::size_t>(j - first_)];
  return acc;
}

// --- duality ---------------------------------------------------------------------

std::vector<DualityRow> duality_check(const System& sys, std::int64_t first,
                                      int count, int depth, int anchor_depth) {
  if (count < 1) fail_assumption("duality check: count must be >= 1");
  const auto ladder = multiplier_ladder(sys, first, count, depth);
  const FiberChain chain(sys, first, count, anchor_depth);
  const std::int64_t terminal = first + count + depth;

  // log nu_j(q_j), matched to the ladder's terminal fiber.
  std::vector<double> log_nu_q(static_cast<std::size_t>(count) + 1);
  for (int j = 0; j <= count; ++j) {
    const auto it = forward_fold(sys, first + j,
                                 static_cast<int>(terminal - (first + j)),
                                 chain.density(first + j));
    log_nu_q[static_cast<std::size_t>(j)] =
        log_einf(it, "duality density fold") -
        ladder.log_einf[static_cast<std::size_t>(j)];
  }

  std::vector<DualityRow> rows;
  rows.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const auto k = static_cast<std::size_t>(j);
    DualityRow row;
    row.fiber = first + j;
    row.nu_q = std::exp(log_nu_q[k]);
    row.nu_q_next = std::exp(log_nu_q[k + 1]);
    row.lambda_plus = ladder.lambda_plus[k];
    row.lambda_minus = chain.lambda_minus(first + j);
    const double log_ratio =
        (log_nu_q[k] + (ladder.log_einf[k] - ladder.log_einf[k + 1])) -
        (log_nu_q[k + 1] + std::log(row.lambda_minus));
    row.ratio = std::exp(log_ratio);
    rows.push_back(row);
  }
  return rows;
}

// --- invariant measure --------------------------------------------------------------

double invariant_measure_eval(const System& sys,
                              const ConformalFunctional& nu,
                              const PiecewiseFn& density,
                              const PiecewiseFn& f) {
  const double mass = nu.ratio(density);
  if (!(mass > 0.0))
    fail_numeric("invariant measure: conformal mass of the density vanished");
  const PiecewiseFn prod = pointwise_mul(f, density, sys.resolution);
  return nu(prod) / mass;
}

PiecewiseFn compose_with_map(const System& sys, int symbol,
                             const PiecewiseFn& f) {
  const OpenMap& map = sys.map(symbol);
  const Interval& base = map.base();
  if (std::abs(f.base().lo - base.lo) > base.length() * kBreakDedupRel ||
      std::abs(f.base().hi - base.hi) > base.length() * kBreakDedupRel)
    fail_assumption("compose: observable lives on a different base interval");

  const double tol = f.dedup_tol();
  std::vector<double> breaks;
  breaks.push_back(base.lo);
  for (const Branch& br : map.branches()) {
    breaks.push_back(br.domain().lo);
    breaks.push_back(br.domain().hi);
    // pull the observable's interior jump locations back through the branch
    const Interval im = br.image();
    for (std::size_t i = 1; i + 1 < f.breaks().size(); ++i) {
      const double y = f.breaks()[i];
      if (y <= im.lo + tol || y >= im.hi - tol) continue;
      breaks.push_back(std::clamp(br.invert(y, map.invert_tol()),
                                  br.domain().lo, br.domain().hi));
    }
  }
  breaks.push_back(base.hi);
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> dedup;
  dedup.push_back(base.lo);
  for (double b : breaks)
    if (b > dedup.back() + tol && b < base.hi - tol) dedup.push_back(b);
  dedup.push_back(base.hi);

  std::vector<Piece> pieces;
  pieces.reserve(dedup.size() - 1);
  for (std::size_t i = 0; i + 1 < dedup.size(); ++i) {
    const double a = dedup[i];
    const double b = dedup[i + 1];
    const double mid = 0.5 * (a + b);
    const Branch* br = nullptr;
    for (const Branch& cand : map.branches()) {
      if (cand.domain().lo <= mid && mid <= cand.domain().hi) {
        br = &cand;
        break;
      }
    }
    if (br == nullptr)
      fail_assumption("compose: branch tiling left a gap in the base");

    const double ymid = std::clamp(br->forward(mid), base.lo, base.hi);
    const auto view = view_of_piece(
        f, f.piece_index(ymid, ymid < base.hi ? Side::Right : Side::Left));
    const auto* ab = std::get_if<AffineBranch>(&br->family());
    if (ab != nullptr && view.is_affine) {
      pieces.push_back(AffinePiece{view.slope * ab->a,
                                   view.slope * ab->b + view.intercept});
      continue;
    }
    const int m =
        std::max(2, prorated_nodes(sys.resolution, b - a, base.length(), 2));
    std::vector<double> values(static_cast<std::size_t>(m) + 1, 0.0);
    for (int k = 0; k <= m; ++k) {
      const double x = std::clamp(a + (b - a) * k / static_cast<double>(m),
                                  br->domain().lo, br->domain().hi);
      const double y = std::clamp(br->forward(x), base.lo, base.hi);
      if (k == 0 || k == m) {
        const Side sx = (k == m) ? Side::Left : Side::Right;
        Side sy = br->increasing() ? sx : flip(sx);
        if (y <= base.lo) sy = Side::Right;
        if (y >= base.hi) sy = Side::Left;
        values[static_cast<std::size_t>(k)] = f.eval(y, sy);
      } else {
        values[static_cast<std::size_t>(k)] = f(y);
      }
    }
    pieces.push_back(SamplePiece{std::move(values)});
  }
  return PiecewiseFn(base, std::move(dedup), std::move(pieces));
}

// --- conformal measure table ----------------------------------------------------------

NuTable nu_table(const System& sys, std::int64_t fiber, int depth, int cells) {
  if (cells < 2) fail_assumption("nu table: need at least 2 cells");
  const ConformalFunctional nu(sys, fiber, depth);
  const Interval base = sys.family.base;
  NuTable out;
  out.fiber = fiber;
  out.depth = depth;
  out.cells = cells;
  out.base = base;
  out.cdf.assign(static_cast<std::size_t>(cells) + 1, 0.0);
  const double h = base.length() / cells;
  for (int k = 1; k < cells; ++k) {
    // indicator + 1 keeps the argument inside the positive cone
    const auto step = PiecewiseFn::indicator(
        base, Interval{base.lo, base.lo + h * k}, 2.0, 1.0);
    out.cdf[static_cast<std::size_t>(k)] = nu.ratio(step) - 1.0;
  }
  out.cdf[static_cast<std::size_t>(cells)] =
      nu.ratio(PiecewiseFn::constant(base, 2.0)) - 1.0;
  return out;
}

double nu_integrate(const NuTable& table, const PiecewiseFn& f) {
  const double h = table.base.length() / table.cells;
  double acc = 0.0;
  for (int k = 0; k < table.cells; ++k) {
    const double mid = table.base.lo + h * (k + 0.5);
    acc += f(mid) * table.cell_mass(k);
  }
  return acc;
}

// --- Lyapunov exponents -----------------------------------------------------------------

LyapunovEstimate lyapunov_exponent(const System& sys, int n, int base_count,
                                   int spacing) {
  if (n < 1) fail_assumption("lyapunov: n must be >= 1");
  if (base_count < 1) fail_assumption("lyapunov: need at least one base point");
  if (spacing <= 0) spacing = n;
  const auto points = sys.driver.base_points(base_count, spacing);
  const PiecewiseFn one = PiecewiseFn::constant(sys.family.base, 1.0);

  LyapunovEstimate out;
  out.n = n;
  out.base_count = static_cast<int>(points.size());
  for (const std::int64_t p : points) {
    const auto it = forward_fold(sys, p, n, one);
    const double lo = essinf(it.fn);
    if (!(lo > 0.0))
      fail_numeric("lyapunov: fold lost positivity (hole too large for this "
                   "depth?)");
    out.einf_samples.push_back((it.log_scale + std::log(lo)) / n);
    out.bv_samples.push_back((it.log_scale + std::log1p(variation(it.fn))) /
                             n);
  }
  const auto e = mean_stderr(out.einf_samples);
  const auto b = mean_stderr(out.bv_samples);
  out.einf_mean = e.mean;
  out.einf_stderr = e.stderr_;
  out.bv_mean = b.mean;
  out.bv_stderr = b.stderr_;
  return out;
}

// --- correlation decay ---------------------------------------------------------------------

namespace {

// Least-squares fit of log |y| against n, ignoring entries too small to
// carry signal.
struct DecayFit {
  double slope = 0.0;
  double corr = 0.0;
  int used = 0;
};

DecayFit fit_log_decay(const std::vector<double>& ns,
                       const std::vector<double>& ys) {
  double peak = 0.0;
  for (double y : ys) peak = std::max(peak, std::abs(y));
  std::vector<double> xs, ls;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double a = std::abs(ys[i]);
    if (a > peak * 1e-13 && a > 0.0) {
      xs.push_back(ns[i]);
      ls.push_back(std::log(a));
    }
  }
  DecayFit out;
  out.used = static_cast<int>(xs.size());
  if (out.used < 2) return out;
  const LinearFit fit = fit_line(xs, ls);
  out.slope = fit.slope;
  out.corr = fit.corr;
  return out;
}

}  // namespace

CorrelationResult correlation_decay(const System& sys, std::int64_t fiber,
                                    int depth, const PiecewiseFn& f,
                                    const PiecewiseFn& h, int n_max) {
  if (n_max < 1) fail_assumption("correlations: n_max must be >= 1");
  const FiberChain chain(sys, fiber - n_max, n_max, depth);
  const ConformalFunctional nu(sys, fiber, depth);
  const PiecewiseFn& q_here = chain.density(fiber);
  const double nu_q = nu.ratio(q_here);
  if (!(nu_q > 0.0))
    fail_numeric("correlations: conformal mass of the density vanished");

  CorrelationResult out;
  for (int n = 1; n <= n_max; ++n) {
    const PiecewiseFn seed =
        pointwise_mul(h, chain.density(fiber - n), sys.resolution);
    const auto pushed = forward_fold(sys, fiber - n, n, seed);
    // deflate the mean through the same fold so the product term cancels
    const double coef = nu(pushed.fn) / nu_q;
    const PiecewiseFn centered = combine(1.0, pushed.fn, -coef, q_here);
    const double raw = nu(pointwise_mul(f, centered, sys.resolution));
    const double log_gain =
        pushed.log_scale - chain.log_lambda_sum(fiber - n, fiber);
    out.points.push_back({n, std::exp(log_gain) * raw / nu_q});
  }

  std::vector<double> ns, ys;
  for (const auto& p : out.points) {
    ns.push_back(static_cast<double>(p.n));
    ys.push_back(p.cov);
  }
  const DecayFit fit = fit_log_decay(ns, ys);
  out.rate = fit.used >= 2 ? std::exp(fit.slope) : 0.0;
  out.fit_corr = fit.corr;
  out.fit_points = fit.used;
  return out;
}

// --- spectral residual -----------------------------------------------------------------------

namespace {

ResidualResult residual_core(const System& sys, std::int64_t fiber,
                             const PiecewiseFn& f, int n_max, int depth,
                             const FiberChain& chain,
                             const MultiplierLadder& ladder) {
  const std::int64_t terminal = fiber + n_max + depth;

  // log nu_j(q_j): the fold of q_j telescopes through the chain down to the
  // terminal density, so beyond the multiplier sum only the infimum of that
  // one density enters.
  const double log_q_term = std::log(essinf(chain.density(terminal)));
  std::vector<double> log_nu_q(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n)
    log_nu_q[static_cast<std::size_t>(n)] =
        chain.log_lambda_sum(fiber + n, terminal) + log_q_term -
        ladder.log_einf[static_cast<std::size_t>(n)];

  if (!(essinf(f) > 0.0))
    fail_assumption("residual: observable must lie in the positive cone");

  ResidualResult out;
  NormalizedIterate it = normalized(f);
  const double log_nu_f =
      log_einf(forward_fold(sys, fiber, static_cast<int>(terminal - fiber), f),
               "residual observable fold") -
      ladder.log_einf[0];

  for (int n = 1; n <= n_max; ++n) {
    it = apply_normalized(sys, sys.driver.symbol_at(fiber + n - 1), it);
    // normalize by the functional multipliers: duality turns the chain's
    // density multipliers into these once the projection uses nu_n(q_n)
    const double gain = std::exp(
        it.log_scale -
        (ladder.log_einf[0] - ladder.log_einf[static_cast<std::size_t>(n)]));
    const double proj = std::exp(log_nu_f -
                                 log_nu_q[static_cast<std::size_t>(n)]);
    const PiecewiseFn residual =
        combine(gain, it.fn, -proj, chain.density(fiber + n));
    const double sup =
        std::max(std::abs(essinf(residual)), std::abs(esssup(residual)));
    out.points.push_back({n, sup});
  }

  std::vector<double> ns, ys;
  for (const auto& p : out.points) {
    ns.push_back(static_cast<double>(p.n));
    ys.push_back(p.sup_norm);
  }
  const DecayFit fit = fit_log_decay(ns, ys);
  out.log_slope = fit.slope;
  out.rate = fit.used >= 2 ? std::exp(fit.slope) : 0.0;
  out.fit_corr = fit.corr;
  out.fit_points = fit.used;
  return out;
}

}  // namespace

ResidualResult rpf_residual(const System& sys, std::int64_t fiber,
                            const PiecewiseFn& f, int n_max, int depth) {
  if (n_max < 1) fail_assumption("residual: n_max must be >= 1");
  const FiberChain chain(sys, fiber, n_max + depth, depth);
  const auto ladder = multiplier_ladder(sys, fiber, n_max, depth);
  return residual_core(sys, fiber, f, n_max, depth, chain, ladder);
}

ResidualResult rpf_residual_psi(const System& sys, std::int64_t fiber,
                                int n_max, int depth) {
  if (n_max < 1) fail_assumption("residual: n_max must be >= 1");
  const FiberChain chain(sys, fiber, n_max + depth, depth);
  const auto ladder = multiplier_ladder(sys, fiber, n_max, depth);
  // psi = q / nu(q) at the starting fiber
  const double log_nu_q0 =
      chain.log_lambda_sum(fiber, fiber + n_max + depth) +
      std::log(essinf(chain.density(fiber + n_max + depth))) -
      ladder.log_einf[0];
  const PiecewiseFn psi =
      scaled(chain.density(fiber), std::exp(-log_nu_q0));
  return residual_core(sys, fiber, psi, n_max, depth, chain, ladder);
}

}  // namespace rpf
