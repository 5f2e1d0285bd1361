#pragma once

#include <cstdint>
#include <vector>

#include "rpf/rpf.hpp"
#include "rpf/transfer.hpp"

namespace rpf {

// Nested hole families indexed by a finite grid of opening parameters, and
// the escape-rate identity: the conformal mass that a smaller-hole measure
// assigns to the larger-hole survivor sets decays at rate equal to the
// difference of the two expected pressures.

struct HoleFamily {
  std::vector<double> epsilons;  // ascending, epsilons[0] == 0
  // holes[e][symbol]: hole set at grid point e; holes[0] must be empty and
  // the family must be nested along e.
  std::vector<std::vector<IntervalSet>> holes;
};

// Grid shape, first entry closed, per-symbol arity, and nesting.
void validate_hole_family(const HoleFamily& fam, const System& sys);

// The system with every map's hole replaced by the grid-point-e holes
// (branches, weights, driving and resolution unchanged).
System system_at_epsilon(const System& sys, const HoleFamily& fam, int e);

// 0/1 indicator of the level-n survivor set of `hole_sys` at `fiber`
// (components merged up to breakpoint tolerance).
PiecewiseFn survivor_indicator(const System& hole_sys, std::int64_t fiber,
                               int n);

// --- survivor mass decay ------------------------------------------------------

struct SurvivorMassPoint {
  int n = 0;
  double mass = 0.0;
};

struct EscapeCurve {
  std::vector<SurvivorMassPoint> points;
  // -slope of log mass, fitted over the upper half of the n range where the
  // transient has died out.
  double fitted_rate = 0.0;
  double fit_corr = 0.0;
  int fit_points = 0;
};

// nu-measure from `nu_sys` (the smaller-hole system) of the survivor sets of
// `hole_sys`, n = 1..n_max; `depth` is the functional's fold depth.
EscapeCurve survivor_mass_curve(const System& nu_sys, const System& hole_sys,
                                std::int64_t fiber, int n_max, int depth);

// --- pressure versus opening ---------------------------------------------------

struct LambdaEpsilonRow {
  double epsilon = 0.0;
  double lambda_mean = 0.0;  // Einf-based expected pressure estimate
  double lambda_stderr = 0.0;
};

struct LambdaEpsilonTable {
  std::vector<LambdaEpsilonRow> rows;
  bool monotone_within_2se = true;
  // For each adjacent grid pair (e, e+1): the identity residual
  // |(lambda_e - lambda_{e+1}) - fitted escape rate of the pair|.
  std::vector<double> pair_residuals;
};

LambdaEpsilonTable lambda_vs_epsilon(const System& sys, const HoleFamily& fam,
                                     int n, int base_count,
                                     std::int64_t mass_fiber, int mass_n_max,
                                     int mass_depth);

}  // namespace rpf
