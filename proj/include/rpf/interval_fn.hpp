#pragma once

#include <variant>
#include <vector>

#include "rpf/common.hpp"

namespace rpf {

// Default number of sample nodes per unit of base-interval length used when
// an operation cannot stay in closed form.  Operations prorate it by piece
// length (minimum kMinPieceNodes nodes per degraded piece).
inline constexpr int kDefaultNodes = 4096;
inline constexpr int kMinPieceNodes = 8;

// Relative tolerance (scaled by base length) used to deduplicate breakpoints.
inline constexpr double kBreakDedupRel = 1e-12;

struct AffinePiece {
  double slope = 0.0;
  double intercept = 0.0;  // value(x) = slope * x + intercept, x in base coords
};

struct SamplePiece {
  // Values at nodes equispaced over the closed piece; size() >= 2.  The piece
  // is the linear interpolant of these values, hence continuous inside.
  std::vector<double> values;
};

using Piece = std::variant<AffinePiece, SamplePiece>;

enum class Side { Left, Right };

// A function of bounded variation on a closed base interval, stored as the
// representative with one-sided limits at every point.  Pieces are continuous
// on their closure; jumps live only at breakpoints, and no value is ever
// stored *at* a breakpoint, so every query goes through one-sided limits.
class PiecewiseFn {
 public:
  PiecewiseFn() = default;
  PiecewiseFn(Interval base, std::vector<double> breaks,
              std::vector<Piece> pieces);

  static PiecewiseFn constant(Interval base, double c);
  static PiecewiseFn affine(Interval base, double slope, double intercept);
  // inside on J clipped to base, outside elsewhere
  static PiecewiseFn indicator(Interval base, Interval j, double inside = 1.0,
                               double outside = 0.0);

  const Interval& base() const { return base_; }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::size_t piece_count() const { return pieces_.size(); }

  // One-sided limit at x.  Side::Left reads the piece ending at x,
  // Side::Right the piece starting at x; at interior points of a piece both
  // agree.  Errors out away from the base interval; at (base.lo, Left) and
  // (base.hi, Right) the adjacent interior limit is returned.
  double eval(double x, Side side) const;

  // Convenience for generic points: right limit, except the left limit at
  // base.hi.
  double operator()(double x) const;

  // Piece index whose closed interval contains x, biased by side.
  std::size_t piece_index(double x, Side side) const;

  Interval piece_interval(std::size_t i) const {
    return {breaks_[i], breaks_[i + 1]};
  }

  double dedup_tol() const { return kBreakDedupRel * base_.length(); }

 private:
  Interval base_{0.0, 1.0};
  std::vector<double> breaks_{0.0, 1.0};      // ascending, first=lo, last=hi
  std::vector<Piece> pieces_{AffinePiece{}};  // size = breaks-1
};

// Restriction of one source piece to a subinterval; cheap evaluator used by
// the binary operations after breakpoint merging.
struct PieceView {
  bool is_affine = true;
  double slope = 0.0;
  double intercept = 0.0;
  const SamplePiece* samples = nullptr;
  double piece_lo = 0.0;  // source piece interval (not the restriction)
  double piece_hi = 1.0;

  double eval(double x) const {
    if (is_affine) return slope * x + intercept;
    const auto& v = samples->values;
    const double span = piece_hi - piece_lo;
    const std::size_t m = v.size() - 1;
    double t = (x - piece_lo) / span * static_cast<double>(m);
    if (t <= 0.0) return v.front();
    if (t >= static_cast<double>(m)) return v.back();
    const std::size_t k = static_cast<std::size_t>(t);
    const double frac = t - static_cast<double>(k);
    return v[k] + (v[k + 1] - v[k]) * frac;
  }
};

PieceView view_of_piece(const PiecewiseFn& f, std::size_t index);

// Total variation of the minimal representative over a set of closed
// intervals: within-piece variation plus jumps at breakpoints strictly inside
// each component.  Components are clipped to the base; empty set gives 0.
double variation_on(const PiecewiseFn& f, const IntervalSet& s);
double variation(const PiecewiseFn& f);

// Essential extrema over a set of intervals via one-sided limits; the empty
// set returns 0 by convention.
double essinf_on(const PiecewiseFn& f, const IntervalSet& s);
double esssup_on(const PiecewiseFn& f, const IntervalSet& s);
double essinf(const PiecewiseFn& f);
double esssup(const PiecewiseFn& f);

// a*f + b*g on the merged breakpoint set.  Affine meets affine stays affine;
// anything else degrades to samples with prorated node count.
PiecewiseFn combine(double a, const PiecewiseFn& f, double b,
                    const PiecewiseFn& g, int resolution = kDefaultNodes);

// Pointwise product.  Affine survives only when one factor has zero slope on
// the piece; a genuine quadratic is resampled.
PiecewiseFn pointwise_mul(const PiecewiseFn& f, const PiecewiseFn& g,
                          int resolution = kDefaultNodes);

// Exact integral of the stored representative against Lebesgue measure.
double integral_lebesgue(const PiecewiseFn& f);

// Rebuilds f on the uniform grid with `resolution` cells plus `protect`ed
// breakpoints (jump locations to keep exact).  Used to stop breakpoint growth
// under repeated operator application.
PiecewiseFn consolidate(const PiecewiseFn& f, int resolution,
                        const std::vector<double>& protect);

// Sup-norm of f - g via shared breakpoints and nodes (exact for the stored
// interpolants up to node coverage).
double sup_distance(const PiecewiseFn& f, const PiecewiseFn& g);

// Merged, deduplicated breakpoint list of both operands.
std::vector<double> merged_breaks(const PiecewiseFn& f, const PiecewiseFn& g);

int prorated_nodes(int resolution, double piece_len, double base_len,
                   int min_nodes = kMinPieceNodes);

}  // namespace rpf
