#include "rpf/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace rpf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log c for the word, or +infinity when the word has no full cylinder (the
// variation bound is vacuous there, so the block length is unusable).
double log_c_or_inf(const System& sys, const std::vector<int>& word) {
  const SurvivorStats stats = survivor_stats(sys.family, word);
  if (stats.full_count == 0 || stats.element_count == 0) return kInf;
  return ly_constants(sys, word).log_c;
}

}  // namespace

ContractionCertificate search_n_star(const System& sys, int n_max,
                                     int base_count, int spacing) {
  if (n_max < 1) fail_schema("n_max must be at least 1");
  if (base_count < 1) fail_schema("base_count must be at least 1");
  ContractionCertificate cert;
  cert.base_count = base_count;
  cert.spacing = spacing;
  const auto points = sys.driver.base_points(base_count, spacing);
  std::vector<double> vals(points.size());
  for (int n = 1; n <= n_max; ++n) {
    bool usable = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
      vals[i] = log_c_or_inf(sys, sys.driver.word(points[i], n));
      if (!std::isfinite(vals[i])) { usable = false; break; }
    }
    if (!usable) {
      cert.tried_n.push_back(n);
      cert.tried_mean.push_back(kInf);
      cert.tried_stderr.push_back(0.0);
      continue;
    }
    const MeanStderr ms = mean_stderr(vals);
    cert.tried_n.push_back(n);
    cert.tried_mean.push_back(ms.mean);
    cert.tried_stderr.push_back(ms.stderr_);
    if (ms.mean + 2.0 * ms.stderr_ < 0.0) {
      cert.certified = true;
      cert.n_star = n;
      cert.mean_log_c = ms.mean;
      cert.stderr_log_c = ms.stderr_;
      cert.gamma = std::exp(0.5 * ms.mean);
      return cert;
    }
  }
  // Report the most negative attempt even though nothing certified.
  std::size_t best = 0;
  for (std::size_t i = 1; i < cert.tried_mean.size(); ++i)
    if (cert.tried_mean[i] < cert.tried_mean[best]) best = i;
  if (!cert.tried_mean.empty() && std::isfinite(cert.tried_mean[best])) {
    cert.n_star = cert.tried_n[best];
    cert.mean_log_c = cert.tried_mean[best];
    cert.stderr_log_c = cert.tried_stderr[best];
  }
  return cert;
}

namespace {

constexpr double kRelStop = 1e-13;
constexpr double kRelStuck = 1e-9;

// The expected per-block decay of the series is -log(gamma) + mean log c
// = mean/2, so the truncation depth follows from the certified margin.
int max_series_terms(const ContractionCertificate& cert) {
  const double decay = -0.5 * cert.mean_log_c;
  if (!(decay > 0.0)) return 64;
  return std::clamp(static_cast<int>(32.0 / decay) + 16, 64, 4096);
}

// LY constants per block index m (the word of length n at fiber m n),
// memoized so overlapping backward series share the enumeration cost.
class BlockCache {
 public:
  BlockCache(const System& sys, int n) : sys_(sys), n_(n) {}
  const LyConstants& at(std::int64_t m) {
    auto it = memo_.find(m);
    if (it == memo_.end()) {
      const auto word = sys_.driver.word(m * n_, n_);
      it = memo_.emplace(m, ly_constants(sys_, word)).first;
    }
    return it->second;
  }

 private:
  const System& sys_;
  int n_;
  std::unordered_map<std::int64_t, LyConstants> memo_;
};

FiberConeParam sum_backward(BlockCache& cache, double gamma, int max_terms,
                            std::int64_t anchor_block) {
  FiberConeParam out;
  double sum = 0.0;
  double log_prod_c = 0.0;  // log prod_{k=1..b-1} c[-k]
  double prev_term = 0.0;
  double term = 0.0;
  int b = 0;
  while (b < max_terms) {
    ++b;
    const LyConstants& ly = cache.at(anchor_block - b);
    prev_term = term;
    term = std::exp(-b * std::log(gamma) + log_prod_c + ly.log_d);
    sum += term;
    log_prod_c += ly.log_c;
    if (b >= 4 && term <= kRelStop * sum) break;
  }
  if (term > kRelStuck * sum)
    fail_numeric("cone parameter series did not decay within the block "
                 "budget; contraction is too weak for a stable truncation");
  out.a = sum;
  out.terms = b;
  const double ratio =
      prev_term > 0.0 ? std::min(term / prev_term, 0.999) : 0.0;
  out.tail_bound = term * ratio / (1.0 - ratio);
  return out;
}

}  // namespace

FiberConeParam fiber_cone_param(const System& sys,
                                const ContractionCertificate& cert,
                                std::int64_t fiber_index) {
  if (!cert.certified)
    fail_assumption("cone parameters need a contraction certificate");
  const int n = cert.n_star;
  // Anchor the backward blocks at the fiber itself: block -b covers
  // [fiber - b n, fiber - (b-1) n).  A non-multiple fiber gets its own
  // block grid, so route through the cache with a shifted origin.
  BlockCache cache(sys, n);
  const std::int64_t anchor = fiber_index / n;
  if (anchor * n != fiber_index) {
    // off-grid anchor: enumerate directly without the shared grid
    FiberConeParam out;
    double sum = 0.0;
    double log_prod_c = 0.0;
    double prev_term = 0.0;
    double term = 0.0;
    const int max_terms = max_series_terms(cert);
    int b = 0;
    while (b < max_terms) {
      ++b;
      const auto word =
          sys.driver.word(fiber_index - static_cast<std::int64_t>(b) * n, n);
      const LyConstants ly = ly_constants(sys, word);
      prev_term = term;
      term = std::exp(-b * std::log(cert.gamma) + log_prod_c + ly.log_d);
      sum += term;
      log_prod_c += ly.log_c;
      if (b >= 4 && term <= kRelStop * sum) break;
    }
    if (term > kRelStuck * sum)
      fail_numeric("cone parameter series did not decay within the block "
                   "budget; contraction is too weak for a stable truncation");
    out.a = sum;
    out.terms = b;
    const double ratio =
        prev_term > 0.0 ? std::min(term / prev_term, 0.999) : 0.0;
    out.tail_bound = term * ratio / (1.0 - ratio);
    return out;
  }
  return sum_backward(cache, cert.gamma, max_series_terms(cert), anchor);
}

ConeParamSeries cone_param_series(const System& sys,
                                  const ContractionCertificate& cert,
                                  int count) {
  if (!cert.certified)
    fail_assumption("cone parameters need a contraction certificate");
  if (count < 1) fail_schema("cone parameter series needs at least 1 fiber");
  const int n = cert.n_star;
  const int max_terms = max_series_terms(cert);
  BlockCache cache(sys, n);
  ConeParamSeries out;
  for (int k = 0; k < count; ++k) {
    const FiberConeParam p = sum_backward(cache, cert.gamma, max_terms, k);
    out.fibers.push_back(static_cast<std::int64_t>(k) * n);
    out.a.push_back(p.a);
    out.terms.push_back(p.terms);
    out.tail_bound.push_back(p.tail_bound);
    const LyConstants& ly = cache.at(k);
    out.block_log_c.push_back(ly.log_c);
    out.block_log_d.push_back(ly.log_d);
  }
  return out;
}

TemperednessProfile temperedness_profile(const System& sys,
                                         const ContractionCertificate& cert,
                                         int count) {
  if (count < 2) fail_schema("temperedness profile needs at least 2 fibers");
  const ConeParamSeries series = cone_param_series(sys, cert, count);
  TemperednessProfile out;
  std::vector<double> xs;
  for (int k = 0; k < count; ++k) {
    out.fibers.push_back(series.fibers[static_cast<std::size_t>(k)]);
    out.log_a.push_back(std::log(series.a[static_cast<std::size_t>(k)]));
    xs.push_back(static_cast<double>(series.fibers[static_cast<std::size_t>(k)]));
  }
  out.slope = fit_line(xs, out.log_a).slope;
  return out;
}

KingmanProfile kingman_profile(const System& sys, int n_max, int base_count,
                               int spacing) {
  if (n_max < 1) fail_schema("n_max must be at least 1");
  KingmanProfile out;
  out.base_count = base_count;
  const auto points = sys.driver.base_points(base_count, spacing);
  double phi_plus = 0.0;
  for (const auto k : points)
    phi_plus += symbol_weight_stats(sys, sys.driver.symbol_at(k)).log_sup;
  out.phi_plus = phi_plus / static_cast<double>(points.size());
  for (int n = 1; n <= n_max; ++n) {
    std::vector<double> beta_samples;
    std::vector<double> phi_samples;
    beta_samples.reserve(points.size());
    phi_samples.reserve(points.size());
    for (const auto k : points) {
      const auto word = sys.driver.word(k, n);
      const SurvivorStats stats = survivor_stats(sys.family, word);
      if (stats.full_count == 0)
        fail_assumption("profile undefined: a sampled word has no full "
                        "cylinder");
      beta_samples.push_back(std::log(static_cast<double>(stats.full_count)) /
                             n);
      phi_samples.push_back(-weight_bounds(sys, word).log_inf_survivor / n);
    }
    const MeanStderr beta = mean_stderr(beta_samples);
    const MeanStderr phi = mean_stderr(phi_samples);
    out.ns.push_back(n);
    out.beta_f_n.push_back(beta.mean);
    out.beta_stderr.push_back(beta.stderr_);
    out.minus_phi_minus_n.push_back(phi.mean);
    out.phi_stderr.push_back(phi.stderr_);
  }
  return out;
}

SufficientMargins sufficient_conditions(const System& sys, int base_count,
                                        int spacing) {
  SufficientMargins out;
  out.base_count = base_count;
  const auto points = sys.driver.base_points(base_count, spacing);
  const double kn = static_cast<double>(points.size());
  double m1 = 0.0;
  double m2 = 0.0;
  double mean_osc = 0.0;
  double mean_log_b = 0.0;
  for (const auto k : points) {
    const int s = sys.driver.symbol_at(k);
    const OpenMap& map = sys.map(s);
    if (map.full_count() == 0)
      fail_assumption("a sampled map has no full branch");
    const SymbolWeightStats ws = symbol_weight_stats(sys, s);
    const double osc = ws.log_sup - ws.log_inf;
    const double xi = static_cast<double>(map.longest_partial_run());
    const double log_b = std::log(static_cast<double>(map.full_count()));
    m1 += osc + std::log(3.0) + std::log1p(ws.var_ratio) +
          std::log1p(2.0 * xi) - log_b;
    m2 += osc + std::log(2.0 + xi) - log_b;
    mean_osc += osc;
    mean_log_b += log_b;
  }
  out.margin_n1 = m1 / kn;
  out.margin_general = m2 / kn;
  mean_osc /= kn;
  mean_log_b /= kn;

  const XiGrowth xg = xi_growth_check(sys, 5, base_count, spacing);
  out.xi_hat = std::exp(std::max(0.0, xg.growth_rate));
  out.margin_xi = mean_osc + std::max(0.0, xg.growth_rate) - mean_log_b;
  out.any_holds = out.margin_n1 < 0.0 || out.margin_general < 0.0 ||
                  (out.margin_xi < 0.0 && xg.within_bound);
  return out;
}

XiGrowth xi_growth_check(const System& sys, int n_max, int base_count,
                         int spacing) {
  if (n_max < 1) fail_schema("n_max must be at least 1");
  XiGrowth out;
  const auto points = sys.driver.base_points(base_count, spacing);
  std::vector<double> xs;
  std::vector<double> ys;
  for (int n = 1; n <= n_max; ++n) {
    double acc = 0.0;
    for (const auto k : points) {
      const auto word = sys.driver.word(k, n);
      const SurvivorStats stats = survivor_stats(sys.family, word);
      const double xi = static_cast<double>(stats.longest_partial_run);
      acc += xi;
      double log_bound = std::log(static_cast<double>(n));
      for (int s : word)
        log_bound +=
            std::log(2.0 + static_cast<double>(
                               sys.map(s).longest_partial_run()));
      if (std::log(std::max(xi, 1.0)) > log_bound + 1e-9)
        out.within_bound = false;
    }
    out.ns.push_back(n);
    out.mean_xi.push_back(acc / static_cast<double>(points.size()));
  }
  for (std::size_t i = 0; i < out.ns.size(); ++i) {
    xs.push_back(static_cast<double>(out.ns[i]));
    ys.push_back(std::log1p(out.mean_xi[i]));
  }
  out.growth_rate = out.ns.size() >= 2 ? fit_line(xs, ys).slope : 0.0;
  return out;
}

}  // namespace rpf
