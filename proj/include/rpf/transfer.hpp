#pragma once

#include <variant>
#include <vector>

#include "rpf/driver.hpp"
#include "rpf/interval_fn.hpp"
#include "rpf/random_map.hpp"

namespace rpf {

// --- weights ----------------------------------------------------------------

// log g constant per symbol (broadcast when a single value is given).
struct ConstantPotential {
  std::vector<double> log_g{0.0};
};

// g = |T'|^(-t), the geometric family.
struct GeometricPotential {
  double t = 1.0;
};

// log g an explicit piecewise-affine function per symbol.
struct PiecewiseLogPotential {
  std::vector<PiecewiseFn> log_g;
};

using Potential =
    std::variant<ConstantPotential, GeometricPotential, PiecewiseLogPotential>;

// The full random system: maps, weights, driving.
struct System {
  MapFamily family;
  Potential potential;
  Driver driver;
  int resolution = kDefaultNodes;  // sample-node budget for degraded pieces
  int nu_cells = 1 << 10;          // CDF table cells for conformal measures

  const OpenMap& map(int symbol) const { return family.at(symbol); }
};

void validate_system(const System& sys);

// log g_symbol(x) when x sits on the given branch; `side` disambiguates
// evaluation at jump points of an explicit log-weight.
double log_weight(const System& sys, int symbol, const Branch& branch, double x,
                  Side side);

// Per-symbol weight statistics over the whole base interval (exact: weight
// restrictions are monotone or affine on every branch).
struct SymbolWeightStats {
  double log_sup = 0.0;   // log esssup_I g
  double log_inf = 0.0;   // log essinf_I g
  double var_ratio = 0.0; // var_I(g) / esssup_I g
};

SymbolWeightStats symbol_weight_stats(const System& sys, int symbol);

// n-step weight bounds along a word.
struct WeightBounds {
  double log_sup_prod = 0.0;      // sum of per-symbol log esssup g
  double log_inf_survivor = 0.0;  // log essinf of the composed weight on the
                                  // level-n survivor set
  double s_tilde = 0.0;           // sum of var/sup ratios along the word
};

WeightBounds weight_bounds(const System& sys, const std::vector<int>& word);

// Lasota-Yorke-type cone constants for one word: the image of the cone with
// parameter a has parameter at most c*a + d.
struct LyConstants {
  double log_c = 0.0;
  double log_d = 0.0;
  double c = 0.0;
  double d = 0.0;
  std::int64_t full_count = 0;
  std::int64_t longest_partial_run = 0;
  WeightBounds bounds;
};

LyConstants ly_constants(const System& sys, const std::vector<int>& word);

// --- the operator -----------------------------------------------------------

// One application of the weighted transfer operator for `symbol`.  Exact on
// affine data; otherwise the result degrades to sampled pieces on the merged
// image partition.  Breakpoint growth is capped at 4 * resolution: beyond the
// cap the result is rebuilt on the uniform grid with the current jump
// locations kept exact.
PiecewiseFn apply_transfer(const System& sys, int symbol, const PiecewiseFn& f);

// L over a word, first symbol applied first.
PiecewiseFn apply_word(const System& sys, const std::vector<int>& word,
                       PiecewiseFn f);

// factor * f, piecewise-exact (no resampling).
PiecewiseFn scaled(const PiecewiseFn& f, double factor);

// Renormalized iteration: keeps the iterate at unit scale and accumulates the
// normalization in log space.
struct NormalizedIterate {
  PiecewiseFn fn;         // scaled so esssup |fn| == 1
  double log_scale = 0.0; // original = exp(log_scale) * fn
};

NormalizedIterate normalized(PiecewiseFn f, double log_scale = 0.0);
NormalizedIterate apply_normalized(const System& sys, int symbol,
                                   const NormalizedIterate& it);

}  // namespace rpf
