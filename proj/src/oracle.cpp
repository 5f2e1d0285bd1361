#include "rpf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rpf/common.hpp"
#include "rpf/random_map.hpp"

namespace rpf {

namespace {

constexpr int kQuadPoints = 32;

// Re-implemented weight evaluation: log g_symbol at a point of a branch.
double oracle_log_weight(const System& sys, int symbol, const Branch& br,
                         double x) {
  if (const auto* cp = std::get_if<ConstantPotential>(&sys.potential)) {
    return cp->log_g.size() == 1
               ? cp->log_g[0]
               : cp->log_g[static_cast<std::size_t>(symbol)];
  }
  if (const auto* gp = std::get_if<GeometricPotential>(&sys.potential)) {
    const double d = std::abs(br.derivative(x));
    if (!(d > 0.0))
      fail_numeric("oracle: zero derivative under a geometric weight");
    return -gp->t * std::log(d);
  }
  const auto& pw = std::get<PiecewiseLogPotential>(sys.potential);
  const PiecewiseFn& lg = pw.log_g[static_cast<std::size_t>(symbol)];
  const Interval& base = lg.base();
  const double xx = std::clamp(x, base.lo, base.hi);
  return lg(xx);
}

bool in_hole(const IntervalSet& hole, double x) {
  for (const Interval& h : hole)
    if (x > h.lo && x < h.hi) return true;
  return false;
}

struct CocycleRun {
  double l1_rate = 0.0;
  double einf_rate = 0.0;
};

CocycleRun run_cocycle(const System& sys,
                       const std::vector<UlamMatrix>& matrices,
                       std::int64_t start, int n) {
  const int cells = matrices.front().cells;
  std::vector<double> v(static_cast<std::size_t>(cells), 1.0);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const int symbol = sys.driver.symbol_at(start + j);
    v = ulam_apply(matrices[static_cast<std::size_t>(symbol)], v);
    double norm = 0.0;
    for (double x : v) norm += std::abs(x);
    if (!(norm > 0.0))
      fail_numeric("oracle: matrix cocycle annihilated the test vector");
    for (double& x : v) x /= norm;
    acc += std::log(norm);
  }
  // exp(acc) = l1 norm of the cocycle applied to the ones vector; dividing
  // by the start norm `cells` gives the growth of the uniform probability
  // vector.
  CocycleRun out;
  const double n_d = static_cast<double>(n);
  out.l1_rate = (acc - std::log(static_cast<double>(cells))) / n_d;
  const double vmin = *std::min_element(v.begin(), v.end());
  if (!(vmin > 0.0))
    fail_numeric("oracle: cocycle minimum vanished (no full cylinder?)");
  out.einf_rate = (acc + std::log(vmin)) / n_d;
  return out;
}

}  // namespace

UlamMatrix ulam_matrix(const System& sys, int symbol, int cells) {
  if (cells < 2) fail_assumption("ulam matrix: need at least 2 cells");
  const OpenMap& map = sys.map(symbol);
  const Interval& base = map.base();
  const double width = base.length() / cells;

  UlamMatrix out;
  out.cells = cells;
  out.base = base;
  out.cols.assign(static_cast<std::size_t>(cells), {});

  std::map<int, double> col;  // reused accumulator, keyed by row
  for (int i = 0; i < cells; ++i) {
    col.clear();
    const Interval cell{base.lo + width * i, base.lo + width * (i + 1)};
    for (const Branch& br : map.branches()) {
      const Interval overlap = cell.clipped_to(br.domain());
      if (overlap.length() <= 0.0) continue;
      // survivors inside the overlap
      const IntervalSet parts =
          subtract_holes(overlap, map.hole(), width * kZeroLengthRel);
      for (const Interval& part : parts) {
        const double ya = br.forward(part.lo);
        const double yb = br.forward(part.hi);
        const Interval image{std::min(ya, yb), std::max(ya, yb)};
        if (image.length() <= 0.0) continue;
        const int k_lo = std::clamp(
            static_cast<int>((image.lo - base.lo) / width), 0, cells - 1);
        const int k_hi = std::clamp(
            static_cast<int>((image.hi - base.lo) / width), 0, cells - 1);
        for (int k = k_lo; k <= k_hi; ++k) {
          const Interval kcell{base.lo + width * k, base.lo + width * (k + 1)};
          const Interval seg = image.clipped_to(kcell);
          if (seg.length() <= 0.0) continue;
          // composite midpoint rule in the image variable
          const double h = seg.length() / kQuadPoints;
          double acc = 0.0;
          for (int q = 0; q < kQuadPoints; ++q) {
            const double y = seg.lo + h * (q + 0.5);
            const double x = br.invert(y, map.invert_tol());
            acc += std::exp(oracle_log_weight(sys, symbol, br, x));
          }
          col[k] += acc * h / width;
        }
      }
    }
    auto& entries = out.cols[static_cast<std::size_t>(i)];
    entries.assign(col.begin(), col.end());
  }
  return out;
}

std::vector<double> ulam_apply(const UlamMatrix& m,
                               const std::vector<double>& v) {
  if (v.size() != static_cast<std::size_t>(m.cells))
    fail_assumption("ulam apply: vector length does not match the matrix");
  std::vector<double> w(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    for (const auto& [k, a] : m.cols[i])
      w[static_cast<std::size_t>(k)] += a * vi;
  }
  return w;
}

OracleLyapunov oracle_lyapunov(const System& sys, int cells, int n,
                               int base_count) {
  if (n < 1) fail_assumption("oracle lyapunov: n must be >= 1");
  if (base_count < 1)
    fail_assumption("oracle lyapunov: need at least one base point");
  std::vector<UlamMatrix> matrices;
  matrices.reserve(sys.family.maps.size());
  for (std::size_t s = 0; s < sys.family.maps.size(); ++s)
    matrices.push_back(ulam_matrix(sys, static_cast<int>(s), cells));

  const auto points = sys.driver.base_points(base_count, n);
  std::vector<double> l1, einf;
  for (const std::int64_t p : points) {
    const CocycleRun run = run_cocycle(sys, matrices, p, n);
    l1.push_back(run.l1_rate);
    einf.push_back(run.einf_rate);
  }
  const auto a = mean_stderr(l1);
  const auto b = mean_stderr(einf);
  OracleLyapunov out;
  out.cells = cells;
  out.n = n;
  out.base_count = static_cast<int>(points.size());
  out.l1_mean = a.mean;
  out.l1_stderr = a.stderr_;
  out.einf_mean = b.mean;
  out.einf_stderr = b.stderr_;
  return out;
}

std::vector<double> oracle_density(const System& sys, std::int64_t fiber,
                                   int depth, int cells) {
  if (depth < 1) fail_assumption("oracle density: depth must be >= 1");
  std::vector<UlamMatrix> matrices;
  for (std::size_t s = 0; s < sys.family.maps.size(); ++s)
    matrices.push_back(ulam_matrix(sys, static_cast<int>(s), cells));
  std::vector<double> v(static_cast<std::size_t>(cells), 1.0);
  for (int j = 0; j < depth; ++j) {
    const int symbol = sys.driver.symbol_at(fiber - depth + j);
    v = ulam_apply(matrices[static_cast<std::size_t>(symbol)], v);
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    if (!(peak > 0.0)) fail_numeric("oracle density: cocycle vanished");
    for (double& x : v) x /= peak;
  }
  const double vmin = *std::min_element(v.begin(), v.end());
  if (!(vmin > 0.0))
    fail_numeric("oracle density: minimum cell value vanished");
  for (double& x : v) x /= vmin;
  return v;
}

std::vector<double> grid_apply(const System& sys, int symbol,
                               const std::vector<double>& values) {
  if (values.size() < 2) fail_assumption("grid apply: need at least 2 nodes");
  const OpenMap& map = sys.map(symbol);
  const Interval& base = map.base();
  const auto nodes = values.size();
  const double h = base.length() / static_cast<double>(nodes - 1);

  auto interp = [&](double x) {
    double t = (x - base.lo) / h;
    if (t <= 0.0) return values.front();
    if (t >= static_cast<double>(nodes - 1)) return values.back();
    const auto j = static_cast<std::size_t>(t);
    const double frac = t - static_cast<double>(j);
    return values[j] + (values[j + 1] - values[j]) * frac;
  };

  std::vector<double> out(nodes, 0.0);
  for (std::size_t k = 0; k < nodes; ++k) {
    const double y = base.lo + h * static_cast<double>(k);
    double acc = 0.0;
    for (const Branch& br : map.branches()) {
      const Interval& im = br.image();
      if (y < im.lo || y > im.hi) continue;
      const double x = br.invert(y, map.invert_tol());
      if (x < br.domain().lo || x > br.domain().hi) continue;
      if (in_hole(map.hole(), x)) continue;
      acc += std::exp(oracle_log_weight(sys, symbol, br, x)) * interp(x);
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace rpf
