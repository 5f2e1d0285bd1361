#include "rpf/common.hpp"

#include <algorithm>

namespace rpf {

IntervalSet subtract_holes(const Interval& whole, const IntervalSet& holes,
                           double min_len) {
  IntervalSet sorted = holes;
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalSet out;
  double cursor = whole.lo;
  for (const auto& h : sorted) {
    Interval cut = h.clipped_to(whole);
    if (cut.degenerate()) continue;
    if (cut.lo - cursor > min_len) out.push_back({cursor, cut.lo});
    cursor = std::max(cursor, cut.hi);
  }
  if (whole.hi - cursor > min_len) out.push_back({cursor, whole.hi});
  return out;
}

IntervalSet interval_union(const IntervalSet& a, const IntervalSet& b,
                           double tol) {
  IntervalSet all = a;
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  IntervalSet out;
  for (const auto& iv : all) {
    if (!out.empty() && iv.lo <= out.back().hi + tol) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

IntervalSet interval_intersection(const IntervalSet& a, const IntervalSet& b,
                                  double min_len) {
  IntervalSet out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    Interval cut = a[i].clipped_to(b[j]);
    if (cut.length() > min_len) out.push_back(cut);
    if (a[i].hi < b[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

void check_hole_set(const Interval& base, const IntervalSet& holes) {
  double prev = base.lo;
  for (std::size_t k = 0; k < holes.size(); ++k) {
    const auto& h = holes[k];
    if (!(h.lo < h.hi)) fail_schema("hole with nonpositive length");
    if (h.lo < base.lo || h.hi > base.hi) fail_schema("hole outside base interval");
    if (k > 0 && h.lo < prev) fail_schema("holes must be sorted and disjoint");
    prev = h.hi;
  }
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit out;
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) fail_numeric("fit_line needs two matched samples");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0) fail_numeric("fit_line: degenerate abscissa");
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.corr = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
  return out;
}

MeanStderr mean_stderr(const std::vector<double>& values) {
  MeanStderr out;
  out.n = values.size();
  if (out.n == 0) return out;
  double m = 0;
  for (double v : values) m += v;
  m /= static_cast<double>(out.n);
  out.mean = m;
  if (out.n > 1) {
    double ss = 0;
    for (double v : values) ss += (v - m) * (v - m);
    const double var = ss / static_cast<double>(out.n - 1);
    out.stderr_ = std::sqrt(var / static_cast<double>(out.n));
  }
  return out;
}

}  // namespace rpf
