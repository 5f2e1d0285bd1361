#include "rpf/interval_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rpf {

namespace {

double clamp_to(double x, const Interval& iv) {
  return std::min(std::max(x, iv.lo), iv.hi);
}

}  // namespace

PiecewiseFn::PiecewiseFn(Interval base, std::vector<double> breaks,
                         std::vector<Piece> pieces)
    : base_(base), breaks_(std::move(breaks)), pieces_(std::move(pieces)) {
  if (base_.length() <= 0.0) fail_schema("PiecewiseFn: empty base interval");
  if (breaks_.size() != pieces_.size() + 1 || pieces_.empty())
    fail_schema("PiecewiseFn: breakpoint/piece count mismatch");
  if (breaks_.front() != base_.lo || breaks_.back() != base_.hi)
    fail_schema("PiecewiseFn: breakpoints must span the base interval");
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    if (!(breaks_[i] < breaks_[i + 1]))
      fail_schema("PiecewiseFn: breakpoints not strictly increasing");
  }
  for (const auto& p : pieces_) {
    if (const auto* sp = std::get_if<SamplePiece>(&p)) {
      if (sp->values.size() < 2)
        fail_schema("PiecewiseFn: sample piece needs at least two nodes");
    }
  }
}

PiecewiseFn PiecewiseFn::constant(Interval base, double c) {
  return affine(base, 0.0, c);
}

PiecewiseFn PiecewiseFn::affine(Interval base, double slope, double intercept) {
  return PiecewiseFn(base, {base.lo, base.hi}, {AffinePiece{slope, intercept}});
}

PiecewiseFn PiecewiseFn::indicator(Interval base, Interval j, double inside,
                                   double outside) {
  Interval cut = j.clipped_to(base);
  if (cut.degenerate()) return constant(base, outside);
  std::vector<double> breaks{base.lo};
  std::vector<Piece> pieces;
  if (cut.lo > base.lo) {
    breaks.push_back(cut.lo);
    pieces.push_back(AffinePiece{0.0, outside});
  }
  breaks.push_back(cut.hi > base.hi ? base.hi : cut.hi);
  pieces.push_back(AffinePiece{0.0, inside});
  if (cut.hi < base.hi) {
    breaks.push_back(base.hi);
    pieces.push_back(AffinePiece{0.0, outside});
  }
  return PiecewiseFn(base, std::move(breaks), std::move(pieces));
}

std::size_t PiecewiseFn::piece_index(double x, Side side) const {
  const double tol = dedup_tol();
  if (x < base_.lo - tol || x > base_.hi + tol)
    fail_numeric("PiecewiseFn: evaluation outside base interval");
  x = clamp_to(x, base_);
  std::ptrdiff_t idx;
  if (side == Side::Right) {
    idx = std::upper_bound(breaks_.begin(), breaks_.end(), x) -
          breaks_.begin() - 1;
  } else {
    idx = std::lower_bound(breaks_.begin(), breaks_.end(), x) -
          breaks_.begin() - 1;
  }
  idx = std::max<std::ptrdiff_t>(0, idx);
  idx = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(pieces_.size()) - 1,
                                 idx);
  return static_cast<std::size_t>(idx);
}

double PiecewiseFn::eval(double x, Side side) const {
  return view_of_piece(*this, piece_index(x, side)).eval(x);
}

double PiecewiseFn::operator()(double x) const {
  return eval(x, x >= base_.hi ? Side::Left : Side::Right);
}

PieceView view_of_piece(const PiecewiseFn& f, std::size_t index) {
  PieceView v;
  const Interval iv = f.piece_interval(index);
  v.piece_lo = iv.lo;
  v.piece_hi = iv.hi;
  const Piece& p = f.pieces()[index];
  if (const auto* ap = std::get_if<AffinePiece>(&p)) {
    v.is_affine = true;
    v.slope = ap->slope;
    v.intercept = ap->intercept;
  } else {
    v.is_affine = false;
    v.samples = std::get_if<SamplePiece>(&p);
  }
  return v;
}

namespace {

// Variation of the linear interpolant of `view` over [a,b] within its piece.
double sample_variation(const PieceView& view, double a, double b) {
  const auto& v = view.samples->values;
  const std::size_t m = v.size() - 1;
  const double span = view.piece_hi - view.piece_lo;
  const double h = span / static_cast<double>(m);
  double prev = view.eval(a);
  double acc = 0.0;
  // first node strictly greater than a
  std::ptrdiff_t k0 = static_cast<std::ptrdiff_t>(
      std::floor((a - view.piece_lo) / h)) + 1;
  k0 = std::max<std::ptrdiff_t>(k0, 0);
  for (std::ptrdiff_t k = k0; k <= static_cast<std::ptrdiff_t>(m); ++k) {
    const double x = view.piece_lo + static_cast<double>(k) * h;
    if (x >= b) break;
    acc += std::fabs(v[static_cast<std::size_t>(k)] - prev);
    prev = v[static_cast<std::size_t>(k)];
  }
  acc += std::fabs(view.eval(b) - prev);
  return acc;
}

void sample_extrema(const PieceView& view, double a, double b, double& lo,
                    double& hi) {
  const auto& v = view.samples->values;
  const std::size_t m = v.size() - 1;
  const double span = view.piece_hi - view.piece_lo;
  const double h = span / static_cast<double>(m);
  const double va = view.eval(a), vb = view.eval(b);
  lo = std::min(lo, std::min(va, vb));
  hi = std::max(hi, std::max(va, vb));
  std::ptrdiff_t k0 = static_cast<std::ptrdiff_t>(
      std::floor((a - view.piece_lo) / h)) + 1;
  k0 = std::max<std::ptrdiff_t>(k0, 0);
  for (std::ptrdiff_t k = k0; k <= static_cast<std::ptrdiff_t>(m); ++k) {
    const double x = view.piece_lo + static_cast<double>(k) * h;
    if (x >= b) break;
    lo = std::min(lo, v[static_cast<std::size_t>(k)]);
    hi = std::max(hi, v[static_cast<std::size_t>(k)]);
  }
}

}  // namespace

double variation_on(const PiecewiseFn& f, const IntervalSet& s) {
  double total = 0.0;
  const auto& breaks = f.breaks();
  for (const auto& comp : s) {
    Interval c = comp.clipped_to(f.base());
    if (c.degenerate()) continue;
    const std::size_t i0 = f.piece_index(c.lo, Side::Right);
    const std::size_t i1 = f.piece_index(c.hi, Side::Left);
    for (std::size_t i = i0; i <= i1; ++i) {
      const Interval piv = f.piece_interval(i);
      const double a = std::max(piv.lo, c.lo);
      const double b = std::min(piv.hi, c.hi);
      if (!(b > a)) continue;
      PieceView view = view_of_piece(f, i);
      if (view.is_affine) {
        total += std::fabs(view.slope) * (b - a);
      } else {
        total += sample_variation(view, a, b);
      }
    }
    // jumps at breakpoints strictly inside (c.lo, c.hi)
    for (std::size_t k = i0 + 1; k <= i1; ++k) {
      const double x = breaks[k];
      if (x > c.lo && x < c.hi) {
        total += std::fabs(f.eval(x, Side::Right) - f.eval(x, Side::Left));
      }
    }
  }
  return total;
}

double variation(const PiecewiseFn& f) {
  return variation_on(f, {f.base()});
}

namespace {

enum class ExtremeKind { Inf, Sup };

double extreme_on(const PiecewiseFn& f, const IntervalSet& s, ExtremeKind kind) {
  bool seen = false;
  double lo = 0.0, hi = 0.0;
  for (const auto& comp : s) {
    Interval c = comp.clipped_to(f.base());
    if (c.degenerate()) continue;
    if (!seen) {
      lo = std::numeric_limits<double>::infinity();
      hi = -std::numeric_limits<double>::infinity();
      seen = true;
    }
    const std::size_t i0 = f.piece_index(c.lo, Side::Right);
    const std::size_t i1 = f.piece_index(c.hi, Side::Left);
    for (std::size_t i = i0; i <= i1; ++i) {
      const Interval piv = f.piece_interval(i);
      const double a = std::max(piv.lo, c.lo);
      const double b = std::min(piv.hi, c.hi);
      if (!(b > a)) continue;
      PieceView view = view_of_piece(f, i);
      if (view.is_affine) {
        const double va = view.eval(a), vb = view.eval(b);
        lo = std::min(lo, std::min(va, vb));
        hi = std::max(hi, std::max(va, vb));
      } else {
        sample_extrema(view, a, b, lo, hi);
      }
    }
  }
  if (!seen) return 0.0;  // essential extrema over the empty set
  return kind == ExtremeKind::Inf ? lo : hi;
}

}  // namespace

double essinf_on(const PiecewiseFn& f, const IntervalSet& s) {
  return extreme_on(f, s, ExtremeKind::Inf);
}

double esssup_on(const PiecewiseFn& f, const IntervalSet& s) {
  return extreme_on(f, s, ExtremeKind::Sup);
}

double essinf(const PiecewiseFn& f) { return essinf_on(f, {f.base()}); }
double esssup(const PiecewiseFn& f) { return esssup_on(f, {f.base()}); }

int prorated_nodes(int resolution, double piece_len, double base_len,
                   int min_nodes) {
  const double cells = static_cast<double>(resolution) * piece_len / base_len;
  int nodes = static_cast<int>(std::llround(cells)) + 1;
  nodes = std::max(nodes, min_nodes);
  nodes = std::min(nodes, resolution + 1);
  return nodes;
}

std::vector<double> merged_breaks(const PiecewiseFn& f, const PiecewiseFn& g) {
  const double tol = std::max(f.dedup_tol(), g.dedup_tol());
  if (std::fabs(f.base().lo - g.base().lo) > tol ||
      std::fabs(f.base().hi - g.base().hi) > tol)
    fail_numeric("mismatched base intervals in binary operation");
  std::vector<double> merged;
  merged.reserve(f.breaks().size() + g.breaks().size());
  std::merge(f.breaks().begin(), f.breaks().end(), g.breaks().begin(),
             g.breaks().end(), std::back_inserter(merged));
  std::vector<double> out;
  out.reserve(merged.size());
  out.push_back(f.base().lo);
  for (double x : merged) {
    if (x - out.back() > tol && f.base().hi - x > tol) out.push_back(x);
  }
  out.push_back(f.base().hi);
  return out;
}

namespace {

template <typename Combiner>
PiecewiseFn binary_op(const PiecewiseFn& f, const PiecewiseFn& g,
                      int resolution, Combiner&& comb) {
  const std::vector<double> breaks = merged_breaks(f, g);
  const double base_len = f.base().length();
  std::vector<Piece> pieces;
  pieces.reserve(breaks.size() - 1);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    const double mid = 0.5 * (a + b);
    PieceView vf = view_of_piece(f, f.piece_index(mid, Side::Right));
    PieceView vg = view_of_piece(g, g.piece_index(mid, Side::Right));
    AffinePiece exact;
    if (comb.exact(vf, vg, exact)) {
      pieces.push_back(exact);
      continue;
    }
    const int nodes = prorated_nodes(resolution, b - a, base_len);
    SamplePiece sp;
    sp.values.resize(static_cast<std::size_t>(nodes));
    const double h = (b - a) / static_cast<double>(nodes - 1);
    for (int k = 0; k < nodes; ++k) {
      const double x = (k == nodes - 1) ? b : a + h * static_cast<double>(k);
      sp.values[static_cast<std::size_t>(k)] = comb.value(vf, vg, x);
    }
    pieces.push_back(std::move(sp));
  }
  return PiecewiseFn(f.base(), breaks, std::move(pieces));
}

struct LinearComb {
  double ca, cb;
  bool exact(const PieceView& vf, const PieceView& vg, AffinePiece& out) const {
    if (!vf.is_affine || !vg.is_affine) return false;
    out.slope = ca * vf.slope + cb * vg.slope;
    out.intercept = ca * vf.intercept + cb * vg.intercept;
    return true;
  }
  double value(const PieceView& vf, const PieceView& vg, double x) const {
    return ca * vf.eval(x) + cb * vg.eval(x);
  }
};

struct ProductComb {
  bool exact(const PieceView& vf, const PieceView& vg, AffinePiece& out) const {
    if (!vf.is_affine || !vg.is_affine) return false;
    if (vf.slope != 0.0 && vg.slope != 0.0) return false;
    out.slope = vf.slope * vg.intercept + vg.slope * vf.intercept;
    out.intercept = vf.intercept * vg.intercept;
    return true;
  }
  double value(const PieceView& vf, const PieceView& vg, double x) const {
    return vf.eval(x) * vg.eval(x);
  }
};

}  // namespace

PiecewiseFn combine(double a, const PiecewiseFn& f, double b,
                    const PiecewiseFn& g, int resolution) {
  return binary_op(f, g, resolution, LinearComb{a, b});
}

PiecewiseFn pointwise_mul(const PiecewiseFn& f, const PiecewiseFn& g,
                          int resolution) {
  return binary_op(f, g, resolution, ProductComb{});
}

double integral_lebesgue(const PiecewiseFn& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.piece_count(); ++i) {
    const Interval iv = f.piece_interval(i);
    const double len = iv.length();
    const Piece& p = f.pieces()[i];
    if (const auto* ap = std::get_if<AffinePiece>(&p)) {
      acc += len * (ap->slope * 0.5 * (iv.lo + iv.hi) + ap->intercept);
    } else {
      const auto& v = std::get_if<SamplePiece>(&p)->values;
      const double h = len / static_cast<double>(v.size() - 1);
      double s = 0.0;
      for (double val : v) s += val;
      s -= 0.5 * (v.front() + v.back());
      acc += h * s;
    }
  }
  return acc;
}

PiecewiseFn consolidate(const PiecewiseFn& f, int resolution,
                        const std::vector<double>& protect) {
  const Interval base = f.base();
  const double tol = f.dedup_tol();
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(resolution) + protect.size() + 2);
  const double h = base.length() / static_cast<double>(resolution);
  for (int j = 0; j <= resolution; ++j)
    pts.push_back(j == resolution ? base.hi
                                  : base.lo + h * static_cast<double>(j));
  for (double x : protect) {
    if (x > base.lo + tol && x < base.hi - tol) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> breaks;
  breaks.reserve(pts.size());
  breaks.push_back(base.lo);
  for (double x : pts) {
    if (x - breaks.back() > tol && base.hi - x > tol) breaks.push_back(x);
  }
  breaks.push_back(base.hi);

  std::vector<Piece> pieces;
  pieces.reserve(breaks.size() - 1);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    const int nodes = prorated_nodes(resolution, b - a, base.length(), 2);
    SamplePiece sp;
    sp.values.resize(static_cast<std::size_t>(nodes));
    const double step = (b - a) / static_cast<double>(nodes - 1);
    sp.values.front() = f.eval(a, Side::Right);
    for (int k = 1; k + 1 < nodes; ++k)
      sp.values[static_cast<std::size_t>(k)] =
          f(a + step * static_cast<double>(k));
    sp.values.back() = f.eval(b, Side::Left);
    pieces.push_back(std::move(sp));
  }
  return PiecewiseFn(base, std::move(breaks), std::move(pieces));
}

double sup_distance(const PiecewiseFn& f, const PiecewiseFn& g) {
  const std::vector<double> breaks = merged_breaks(f, g);
  double best = 0.0;
  auto consider = [&](double vf, double vg) {
    best = std::max(best, std::fabs(vf - vg));
  };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    const double mid = 0.5 * (a + b);
    PieceView vf = view_of_piece(f, f.piece_index(mid, Side::Right));
    PieceView vg = view_of_piece(g, g.piece_index(mid, Side::Right));
    consider(vf.eval(a), vg.eval(a));
    consider(vf.eval(b), vg.eval(b));
    // kinks of either interpolant inside (a,b)
    for (const PieceView* v : {&vf, &vg}) {
      if (v->is_affine) continue;
      const auto& vals = v->samples->values;
      const std::size_t m = vals.size() - 1;
      const double h = (v->piece_hi - v->piece_lo) / static_cast<double>(m);
      std::ptrdiff_t k0 = static_cast<std::ptrdiff_t>(
          std::floor((a - v->piece_lo) / h)) + 1;
      k0 = std::max<std::ptrdiff_t>(k0, 0);
      for (std::ptrdiff_t k = k0; k <= static_cast<std::ptrdiff_t>(m); ++k) {
        const double x = v->piece_lo + static_cast<double>(k) * h;
        if (x >= b) break;
        consider(vf.eval(x), vg.eval(x));
      }
    }
  }
  return best;
}

}  // namespace rpf
