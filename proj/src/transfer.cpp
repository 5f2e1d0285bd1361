#include "rpf/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rpf {

namespace {

double const_log_g(const ConstantPotential& p, int symbol) {
  if (p.log_g.empty()) fail_schema("constant potential has no values");
  if (p.log_g.size() == 1) return p.log_g[0];
  if (symbol < 0 || static_cast<std::size_t>(symbol) >= p.log_g.size())
    fail_schema("constant potential missing a symbol entry");
  return p.log_g[static_cast<std::size_t>(symbol)];
}

Side flip(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

double clamp_to(double x, const Interval& iv) {
  return std::min(std::max(x, iv.lo), iv.hi);
}

// Variation of exp(L) for piecewise L: monotone between nodes on every piece,
// so endpoint differences are exact; jumps enter at interior breakpoints.
double exp_variation(const PiecewiseFn& L) {
  double var = 0.0;
  for (std::size_t i = 0; i < L.piece_count(); ++i) {
    const Interval piv = L.piece_interval(i);
    if (const auto* sp = std::get_if<SamplePiece>(&L.pieces()[i])) {
      const auto& v = sp->values;
      for (std::size_t k = 0; k + 1 < v.size(); ++k)
        var += std::abs(std::exp(v[k + 1]) - std::exp(v[k]));
    } else {
      var += std::abs(std::exp(L.eval(piv.hi, Side::Left)) -
                      std::exp(L.eval(piv.lo, Side::Right)));
    }
    if (i > 0)
      var += std::abs(std::exp(L.eval(piv.lo, Side::Right)) -
                      std::exp(L.eval(piv.lo, Side::Left)));
  }
  return var;
}

const PiecewiseFn& pw_log_for(const PiecewiseLogPotential& p, int symbol) {
  if (symbol < 0 || static_cast<std::size_t>(symbol) >= p.log_g.size())
    fail_schema("piecewise log-weight missing a symbol entry");
  return p.log_g[static_cast<std::size_t>(symbol)];
}

}  // namespace

void validate_system(const System& sys) {
  validate_family(sys.family);
  const int n_maps = static_cast<int>(sys.family.maps.size());
  if (sys.driver.symbol_count() > n_maps)
    fail_schema("driver emits more symbols than the map family defines");
  if (sys.resolution < 16) fail_schema("resolution must be at least 16");
  if (sys.nu_cells < 8) fail_schema("nu_cells must be at least 8");
  if (const auto* cp = std::get_if<ConstantPotential>(&sys.potential)) {
    if (cp->log_g.size() != 1 &&
        cp->log_g.size() != static_cast<std::size_t>(n_maps))
      fail_schema("constant potential needs one value or one per map");
    for (double v : cp->log_g)
      if (!std::isfinite(v)) fail_schema("non-finite log-weight");
  } else if (const auto* gp = std::get_if<GeometricPotential>(&sys.potential)) {
    if (!std::isfinite(gp->t)) fail_schema("non-finite geometric exponent");
  } else {
    const auto& pw = std::get<PiecewiseLogPotential>(sys.potential);
    if (pw.log_g.size() != static_cast<std::size_t>(n_maps))
      fail_schema("piecewise log-weight needs one function per map");
    const double tol = kBreakDedupRel * sys.family.base.length();
    for (const auto& L : pw.log_g)
      if (std::abs(L.base().lo - sys.family.base.lo) > tol ||
          std::abs(L.base().hi - sys.family.base.hi) > tol)
        fail_schema("log-weight base interval does not match the maps");
  }
}

double log_weight(const System& sys, int symbol, const Branch& branch, double x,
                  Side side) {
  if (const auto* cp = std::get_if<ConstantPotential>(&sys.potential))
    return const_log_g(*cp, symbol);
  if (const auto* gp = std::get_if<GeometricPotential>(&sys.potential)) {
    const double d = std::abs(branch.derivative(x));
    if (d <= 0.0) fail_assumption("zero derivative inside a branch");
    return -gp->t * std::log(d);
  }
  const auto& L = pw_log_for(std::get<PiecewiseLogPotential>(sys.potential),
                             symbol);
  if (x <= L.base().lo) return L.eval(L.base().lo, Side::Right);
  if (x >= L.base().hi) return L.eval(L.base().hi, Side::Left);
  return L.eval(x, side);
}

SymbolWeightStats symbol_weight_stats(const System& sys, int symbol) {
  SymbolWeightStats st;
  if (const auto* cp = std::get_if<ConstantPotential>(&sys.potential)) {
    st.log_sup = st.log_inf = const_log_g(*cp, symbol);
    st.var_ratio = 0.0;
    return st;
  }
  if (const auto* gp = std::get_if<GeometricPotential>(&sys.potential)) {
    const auto& branches = sys.map(symbol).branches();
    const double t = gp->t;
    double lsup = -std::numeric_limits<double>::infinity();
    double linf = std::numeric_limits<double>::infinity();
    double var = 0.0;
    double prev_hi_val = 0.0;
    for (std::size_t i = 0; i < branches.size(); ++i) {
      const Branch& br = branches[i];
      const double dmin = br.abs_deriv_min();
      const double dmax = br.abs_deriv_max();
      if (dmin <= 0.0)
        fail_assumption("geometric weight unbounded: branch derivative "
                        "reaches zero");
      const double la = -t * std::log(dmin);
      const double lb = -t * std::log(dmax);
      lsup = std::max(lsup, std::max(la, lb));
      linf = std::min(linf, std::min(la, lb));
      var += std::abs(std::exp(la) - std::exp(lb));
      const double lo_val =
          std::pow(std::abs(br.derivative(br.domain().lo)), -t);
      const double hi_val =
          std::pow(std::abs(br.derivative(br.domain().hi)), -t);
      if (i > 0) var += std::abs(lo_val - prev_hi_val);
      prev_hi_val = hi_val;
    }
    st.log_sup = lsup;
    st.log_inf = linf;
    st.var_ratio = var / std::exp(lsup);
    return st;
  }
  const auto& L = pw_log_for(std::get<PiecewiseLogPotential>(sys.potential),
                             symbol);
  st.log_sup = esssup(L);
  st.log_inf = essinf(L);
  st.var_ratio = exp_variation(L) / std::exp(st.log_sup);
  return st;
}

WeightBounds weight_bounds(const System& sys, const std::vector<int>& word) {
  if (word.empty()) fail_schema("empty word");
  WeightBounds wb;
  for (int s : word) {
    const SymbolWeightStats st = symbol_weight_stats(sys, s);
    wb.log_sup_prod += st.log_sup;
    wb.s_tilde += st.var_ratio;
  }
  if (const auto* cp = std::get_if<ConstantPotential>(&sys.potential)) {
    const SurvivorStats stats = survivor_stats(sys.family, word);
    if (stats.element_count == 0)
      fail_assumption("survivor set is empty for the word");
    double acc = 0.0;
    for (int s : word) acc += const_log_g(*cp, s);
    wb.log_inf_survivor = acc;
    return wb;
  }
  // Composed weight varies along each cylinder: minimize over a node grid.
  // The minimum of the smooth composition on a grid this dense is accurate
  // far beyond the certification margins it feeds.
  const Interval& base = sys.family.base;
  const auto elems = survivor_partition(sys.family, word);
  if (elems.empty()) fail_assumption("survivor set is empty for the word");
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& e : elems) {
    const int m = std::max(
        16, prorated_nodes(sys.resolution, e.dom.length(), base.length(), 16));
    for (int k = 0; k <= m; ++k) {
      double x = e.dom.lo + e.dom.length() * k / m;
      double acc = 0.0;
      for (std::size_t j = 0; j < word.size(); ++j) {
        const OpenMap& map = sys.map(word[j]);
        const Branch& br = map.branches()[static_cast<std::size_t>(
            e.branch_chain[j])];
        x = clamp_to(x, br.domain());
        const Side side = x < base.hi ? Side::Right : Side::Left;
        acc += log_weight(sys, word[j], br, x, side);
        x = br.forward(x);
      }
      lo = std::min(lo, acc);
    }
  }
  wb.log_inf_survivor = lo;
  return wb;
}

LyConstants ly_constants(const System& sys, const std::vector<int>& word) {
  LyConstants out;
  const SurvivorStats stats = survivor_stats(sys.family, word);
  if (stats.full_count == 0)
    fail_assumption("word has no full cylinder; variation bound degenerates");
  out.full_count = stats.full_count;
  out.longest_partial_run = stats.longest_partial_run;
  out.bounds = weight_bounds(sys, word);
  const double xi = static_cast<double>(stats.longest_partial_run);
  out.log_d = std::log(3.0) + std::log1p(out.bounds.s_tilde) +
              std::log1p(2.0 * xi) + out.bounds.log_sup_prod -
              out.bounds.log_inf_survivor;
  out.log_c = out.log_d - std::log(static_cast<double>(stats.full_count));
  out.d = std::exp(out.log_d);
  out.c = std::exp(out.log_c);
  return out;
}

// --- operator application ---------------------------------------------------

namespace {

struct Contributor {
  const Level1Element* elem = nullptr;
  const Branch* branch = nullptr;
};

// Breakpoints of `src` strictly inside `dom` pushed forward through `br`.
void push_interior_breaks(const PiecewiseFn& src, const Interval& dom,
                          const Branch& br, double tol,
                          std::vector<double>* out) {
  for (double b : src.breaks()) {
    if (b <= dom.lo + tol) continue;
    if (b >= dom.hi - tol) continue;
    out->push_back(br.forward(b));
  }
}

std::vector<double> dedup_sorted(std::vector<double> v, const Interval& base,
                                 double tol) {
  v.push_back(base.lo);
  v.push_back(base.hi);
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) {
    x = clamp_to(x, base);
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  }
  if (out.size() < 2) fail_numeric("degenerate breakpoint set");
  out.front() = base.lo;
  out.back() = base.hi;
  return out;
}

}  // namespace

PiecewiseFn apply_transfer(const System& sys, int symbol,
                           const PiecewiseFn& f) {
  const OpenMap& map = sys.map(symbol);
  const Interval& base = map.base();
  const double tol = kBreakDedupRel * base.length();
  if (std::abs(f.base().lo - base.lo) > tol ||
      std::abs(f.base().hi - base.hi) > tol)
    fail_schema("function base does not match the map");

  const auto* pwlog = std::get_if<PiecewiseLogPotential>(&sys.potential);
  const PiecewiseFn* logw =
      pwlog ? &pw_log_for(*pwlog, symbol) : nullptr;

  // Jump locations of the image: element image endpoints.  These stay exact
  // even when breakpoint growth forces a rebuild on the uniform grid.
  std::vector<double> protect;
  for (const auto& e : map.elements()) {
    protect.push_back(e.image.lo);
    protect.push_back(e.image.hi);
  }

  std::vector<double> breaks = protect;
  for (const auto& e : map.elements()) {
    const Branch& br = map.branches()[static_cast<std::size_t>(e.branch)];
    push_interior_breaks(f, e.dom, br, tol, &breaks);
    if (logw) push_interior_breaks(*logw, e.dom, br, tol, &breaks);
  }

  const std::size_t cap =
      static_cast<std::size_t>(4) * static_cast<std::size_t>(sys.resolution) +
      16;
  bool consolidating = false;
  if (breaks.size() > cap) {
    consolidating = true;
    breaks = protect;
    for (int k = 1; k < sys.resolution; ++k)
      breaks.push_back(base.lo +
                       base.length() * k / static_cast<double>(sys.resolution));
  }
  breaks = dedup_sorted(std::move(breaks), base, tol);

  const auto* cp = std::get_if<ConstantPotential>(&sys.potential);
  const auto* gp = std::get_if<GeometricPotential>(&sys.potential);

  std::vector<Piece> pieces;
  pieces.reserve(breaks.size() - 1);
  std::vector<Contributor> contrib;
  for (std::size_t pi = 0; pi + 1 < breaks.size(); ++pi) {
    const double a = breaks[pi];
    const double b = breaks[pi + 1];
    const double mid = 0.5 * (a + b);
    contrib.clear();
    for (const auto& e : map.elements())
      if (e.image.lo <= mid && mid <= e.image.hi)
        contrib.push_back(
            {&e, &map.branches()[static_cast<std::size_t>(e.branch)]});
    if (contrib.empty()) {
      pieces.push_back(AffinePiece{0.0, 0.0});
      continue;
    }

    // Closed form survives when every contributor is an affine branch whose
    // pulled-back integrand is still affine: f affine on the preimage piece
    // and weight affine there with a zero slope product.
    bool exact = !consolidating;
    double slope_y = 0.0;
    double inter_y = 0.0;
    if (exact) {
      for (const auto& c : contrib) {
        const auto* ab = std::get_if<AffineBranch>(&c.branch->family());
        if (!ab) { exact = false; break; }
        const double aa = ab->a;
        const double bb = ab->b;
        const double xmid = clamp_to((mid - bb) / aa, c.elem->dom);
        const auto fi = f.piece_index(xmid, Side::Right);
        const auto* fp = std::get_if<AffinePiece>(&f.pieces()[fi]);
        if (!fp) { exact = false; break; }
        double gv;  // weight constant on the piece, or no closed form
        if (cp) {
          gv = std::exp(const_log_g(*cp, symbol));
        } else if (gp) {
          gv = std::pow(std::abs(aa), -gp->t);
        } else {
          const auto li = logw->piece_index(xmid, Side::Right);
          const auto* lp = std::get_if<AffinePiece>(&logw->pieces()[li]);
          if (!lp || lp->slope != 0.0) { exact = false; break; }
          gv = std::exp(lp->intercept);
        }
        const double slope_x = fp->slope * gv;
        const double inter_x = fp->intercept * gv;
        slope_y += slope_x / aa;
        inter_y += inter_x - slope_x * bb / aa;
      }
    }
    if (exact) {
      pieces.push_back(AffinePiece{slope_y, inter_y});
      continue;
    }

    const int m =
        std::max(2, prorated_nodes(sys.resolution, b - a, base.length(), 2));
    std::vector<double> values(static_cast<std::size_t>(m) + 1, 0.0);
    for (int k = 0; k <= m; ++k) {
      const double y = a + (b - a) * k / static_cast<double>(m);
      const Side side_y = (k == m) ? Side::Left : Side::Right;
      double acc = 0.0;
      for (const auto& c : contrib) {
        const double x =
            clamp_to(c.branch->invert(y, map.invert_tol()), c.elem->dom);
        const Side side_x =
            c.branch->increasing() ? side_y : flip(side_y);
        const double fv = (k == 0 || k == m)
                              ? f.eval(x, side_x)
                              : f(x);
        const double gv =
            std::exp(log_weight(sys, symbol, *c.branch, x,
                                (k == 0 || k == m) ? side_x : Side::Right));
        acc += fv * gv;
      }
      values[static_cast<std::size_t>(k)] = acc;
    }
    pieces.push_back(SamplePiece{std::move(values)});
  }

  return PiecewiseFn(base, std::move(breaks), std::move(pieces));
}

PiecewiseFn apply_word(const System& sys, const std::vector<int>& word,
                       PiecewiseFn f) {
  for (int s : word) f = apply_transfer(sys, s, f);
  return f;
}

PiecewiseFn scaled(const PiecewiseFn& f, double factor) {
  std::vector<Piece> pieces;
  pieces.reserve(f.piece_count());
  for (const auto& p : f.pieces()) {
    if (const auto* ap = std::get_if<AffinePiece>(&p)) {
      pieces.push_back(AffinePiece{ap->slope * factor, ap->intercept * factor});
    } else {
      SamplePiece sp = std::get<SamplePiece>(p);
      for (double& v : sp.values) v *= factor;
      pieces.push_back(std::move(sp));
    }
  }
  return PiecewiseFn(f.base(), f.breaks(), std::move(pieces));
}

NormalizedIterate normalized(PiecewiseFn f, double log_scale) {
  const double hi = esssup(f);
  const double lo = essinf(f);
  const double scale = std::max(std::abs(hi), std::abs(lo));
  if (!(scale > 0.0) || !std::isfinite(scale))
    fail_numeric("cannot normalize: zero or non-finite sup norm");
  NormalizedIterate out{scaled(f, 1.0 / scale), log_scale + std::log(scale)};
  return out;
}

NormalizedIterate apply_normalized(const System& sys, int symbol,
                                   const NormalizedIterate& it) {
  return normalized(apply_transfer(sys, symbol, it.fn), it.log_scale);
}

}  // namespace rpf
