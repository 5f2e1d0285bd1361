#include "rpf/escape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rpf/common.hpp"
#include "rpf/random_map.hpp"

namespace rpf {

void validate_hole_family(const HoleFamily& fam, const System& sys) {
  if (fam.epsilons.empty())
    fail_schema("hole family: empty epsilon grid");
  if (fam.epsilons.size() != fam.holes.size())
    fail_schema("hole family: epsilon grid and hole list sizes differ");
  if (fam.epsilons.front() != 0.0)
    fail_schema("hole family: grid must start at 0");
  for (std::size_t e = 1; e < fam.epsilons.size(); ++e)
    if (!(fam.epsilons[e] > fam.epsilons[e - 1]))
      fail_schema("hole family: epsilon grid must be strictly increasing");
  if (!fam.holes.front().empty()) {
    for (const auto& h : fam.holes.front())
      if (!h.empty())
        fail_schema("hole family: grid point 0 must have empty holes");
  }

  const std::size_t symbols = sys.family.maps.size();
  const Interval& base = sys.family.base;
  const double tol = kBreakDedupRel * base.length();
  for (std::size_t e = 0; e < fam.holes.size(); ++e) {
    if (!fam.holes[e].empty() && fam.holes[e].size() != symbols)
      fail_schema("hole family: per-symbol hole count does not match the map "
                  "family");
    for (const auto& h : fam.holes[e]) check_hole_set(base, h);
  }
  // monotone nesting along the grid
  for (std::size_t e = 0; e + 1 < fam.holes.size(); ++e) {
    if (fam.holes[e].empty()) continue;  // closed level nests trivially
    for (std::size_t s = 0; s < symbols; ++s) {
      const IntervalSet& small = fam.holes[e][s];
      const IntervalSet& big =
          fam.holes[e + 1].empty() ? IntervalSet{} : fam.holes[e + 1][s];
      for (const Interval& c : small) {
        const bool covered =
            std::any_of(big.begin(), big.end(), [&](const Interval& d) {
              return d.lo <= c.lo + tol && c.hi <= d.hi + tol;
            });
        if (!covered)
          fail_assumption(
              "hole family is not nested: a hole at grid point " +
              std::to_string(e) + " escapes every hole at the next point");
      }
    }
  }
}

System system_at_epsilon(const System& sys, const HoleFamily& fam, int e) {
  if (e < 0 || static_cast<std::size_t>(e) >= fam.epsilons.size())
    fail_assumption("epsilon index outside the configured grid");
  System out = sys;
  std::vector<OpenMap> maps;
  maps.reserve(sys.family.maps.size());
  for (std::size_t s = 0; s < sys.family.maps.size(); ++s) {
    const IntervalSet holes = fam.holes[static_cast<std::size_t>(e)].empty()
                                  ? IntervalSet{}
                                  : fam.holes[static_cast<std::size_t>(e)][s];
    maps.emplace_back(sys.family.base, sys.family.maps[s].branches(), holes);
  }
  out.family.maps = std::move(maps);
  validate_family(out.family);
  return out;
}

PiecewiseFn survivor_indicator(const System& hole_sys, std::int64_t fiber,
                               int n) {
  if (n < 1) fail_assumption("survivor indicator: n must be >= 1");
  const auto word = hole_sys.driver.word(fiber, n);
  const auto elements = survivor_partition(hole_sys.family, word);
  const Interval& base = hole_sys.family.base;
  const double tol = kBreakDedupRel * base.length();

  // merge abutting element domains into maximal components
  IntervalSet comps;
  for (const auto& e : elements) {
    if (e.dom.length() <= tol) continue;
    if (!comps.empty() && e.dom.lo <= comps.back().hi + tol)
      comps.back().hi = std::max(comps.back().hi, e.dom.hi);
    else
      comps.push_back(e.dom);
  }
  if (comps.empty())
    fail_numeric("survivor set is empty at this depth; nothing survives");

  std::vector<double> breaks;
  std::vector<Piece> pieces;
  breaks.push_back(base.lo);
  auto emit = [&](double upto, double value) {
    if (upto > breaks.back() + tol) {
      breaks.push_back(upto);
      pieces.push_back(AffinePiece{0.0, value});
    }
  };
  for (const auto& c : comps) {
    emit(c.lo, 0.0);
    emit(std::min(c.hi, base.hi), 1.0);
  }
  emit(base.hi, 0.0);
  breaks.back() = base.hi;
  return PiecewiseFn(base, std::move(breaks), std::move(pieces));
}

EscapeCurve survivor_mass_curve(const System& nu_sys, const System& hole_sys,
                                std::int64_t fiber, int n_max, int depth) {
  if (n_max < 1) fail_assumption("survivor mass: n_max must be >= 1");
  // The level-n survivor indicator never materializes (its component count
  // grows exponentially in n): n steps of the holed operator applied to f
  // equal n steps of the nu-side operator applied to f times the indicator,
  // because the extra branches the smaller holes admit are exactly the ones
  // the indicator kills.  So nu(indicator) is a quotient of two folds from
  // the same fiber to the same terminal fiber, one switching operators at
  // step n.
  const Interval& base = nu_sys.family.base;
  const PiecewiseFn one = PiecewiseFn::constant(base, 1.0);

  // -inf marks a fold whose essential infimum has not become positive yet
  auto log_einf_of = [](const NormalizedIterate& it) {
    const double inf = essinf(it.fn);
    return inf > 0.0 ? it.log_scale + std::log(inf)
                     : -std::numeric_limits<double>::infinity();
  };

  // one incremental nu-side fold, Einf recorded after every step
  std::vector<double> log_den(static_cast<std::size_t>(n_max + depth) + 1);
  {
    NormalizedIterate it = normalized(one);
    log_den[0] = log_einf_of(it);
    for (int m = 0; m < n_max + depth; ++m) {
      it = apply_normalized(nu_sys, nu_sys.driver.symbol_at(fiber + m), it);
      log_den[static_cast<std::size_t>(m) + 1] = log_einf_of(it);
    }
  }

  EscapeCurve out;
  for (int n = 1; n <= n_max; ++n) {
    NormalizedIterate it = normalized(one);
    for (int m = 0; m < n + depth; ++m) {
      const System& step = m < n ? hole_sys : nu_sys;
      it = apply_normalized(step, step.driver.symbol_at(fiber + m), it);
    }
    const double log_num = log_einf_of(it);
    const double den = log_den[static_cast<std::size_t>(n + depth)];
    if (!std::isfinite(den))
      fail_numeric("survivor mass: reference fold has no positive infimum at "
                   "depth " + std::to_string(n + depth));
    out.points.push_back(
        {n, std::isfinite(log_num) ? std::exp(log_num - den) : 0.0});
  }

  // fit over the upper half of the range to suppress the transient
  std::vector<double> ns, logs;
  for (const auto& p : out.points) {
    if (p.n < (n_max + 1) / 2 || !(p.mass > 0.0)) continue;
    ns.push_back(static_cast<double>(p.n));
    logs.push_back(std::log(p.mass));
  }
  out.fit_points = static_cast<int>(ns.size());
  if (out.fit_points >= 2) {
    const LinearFit fit = fit_line(ns, logs);
    out.fitted_rate = -fit.slope;
    out.fit_corr = fit.corr;
  }
  return out;
}

LambdaEpsilonTable lambda_vs_epsilon(const System& sys, const HoleFamily& fam,
                                     int n, int base_count,
                                     std::int64_t mass_fiber, int mass_n_max,
                                     int mass_depth) {
  validate_hole_family(fam, sys);
  LambdaEpsilonTable out;
  std::vector<System> systems;
  systems.reserve(fam.epsilons.size());
  for (std::size_t e = 0; e < fam.epsilons.size(); ++e)
    systems.push_back(system_at_epsilon(sys, fam, static_cast<int>(e)));

  for (std::size_t e = 0; e < systems.size(); ++e) {
    const auto est = lyapunov_exponent(systems[e], n, base_count);
    out.rows.push_back({fam.epsilons[e], est.einf_mean, est.einf_stderr});
  }

  for (std::size_t e = 0; e + 1 < out.rows.size(); ++e) {
    const auto& a = out.rows[e];
    const auto& b = out.rows[e + 1];
    const double slack =
        2.0 * std::sqrt(a.lambda_stderr * a.lambda_stderr +
                        b.lambda_stderr * b.lambda_stderr);
    if (b.lambda_mean > a.lambda_mean + slack)
      out.monotone_within_2se = false;

    const EscapeCurve curve = survivor_mass_curve(
        systems[e], systems[e + 1], mass_fiber, mass_n_max, mass_depth);
    out.pair_residuals.push_back(
        std::abs((a.lambda_mean - b.lambda_mean) - curve.fitted_rate));
  }
  return out;
}

}  // namespace rpf
