#include "rpf/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "rpf/certify.hpp"
#include "rpf/cone.hpp"
#include "rpf/escape.hpp"
#include "rpf/oracle.hpp"
#include "rpf/rpf.hpp"

namespace rpf {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::int64_t v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "1" : "0"; }

// The five fixed observables used by the invariant command: a mix of smooth,
// kinked, and discontinuous BV functions.
std::vector<std::pair<std::string, PiecewiseFn>> observable_panel(
    const System& sys) {
  const Interval& base = sys.family.base;
  const double mid = base.lo + 0.4 * base.length();
  const PiecewiseFn x = PiecewiseFn::affine(base, 1.0, 0.0);
  const PiecewiseFn kink(base, {base.lo, mid, base.hi},
                         {Piece{AffinePiece{-1.0, mid}},
                          Piece{AffinePiece{1.0, -mid}}});
  const PiecewiseFn square = pointwise_mul(x, x, sys.resolution);
  const PiecewiseFn window = PiecewiseFn::indicator(
      base, {base.lo + 0.2 * base.length(), base.lo + 0.7 * base.length()});
  const PiecewiseFn cube = pointwise_mul(square, x, sys.resolution);
  return {{"x", x},
          {"abs(x-0.4)", kink},
          {"x^2", square},
          {"window_0.2_0.7", window},
          {"x^3", cube}};
}

// Largest depth whose composed partition stays within `budget` elements per
// word, given `e1` level-1 survivor elements per step.
int depth_cap(double e1, double budget, int roof) {
  if (e1 <= 1.0) return roof;
  int cap = 1;
  double tree = e1;
  while (cap < roof && tree * e1 <= budget) {
    tree *= e1;
    ++cap;
  }
  return cap;
}

RunResult run_certify(const LoadedConfig& cfg) {
  const System& sys = cfg.system;
  const RunParams& run = cfg.run;
  const int spacing = std::max(run.n, 1);
  // The block search and the profiles walk composed partitions, whose element
  // count grows geometrically with the depth.  Non-constant weights pay an
  // extra per-element refinement, so their budget is much smaller.
  double e1 = 1.0;
  for (std::size_t s = 0; s < sys.family.maps.size(); ++s)
    e1 = std::max(
        e1, static_cast<double>(
                survivor_stats(sys.family, {static_cast<int>(s)})
                    .element_count));
  const bool weighted =
      !std::holds_alternative<ConstantPotential>(sys.potential);
  const double word_budget = weighted ? 6e4 : 5e7;
  const int search_cap =
      std::min({run.n, 12, depth_cap(e1, word_budget, 12)});
  const int profile_cap =
      std::min({run.n, 8, depth_cap(e1, word_budget, 8)});
  const int xi_cap = std::min({run.n, 8, depth_cap(e1, 5e7, 8)});

  RunResult out;
  out.command = "certify";

  const ContractionCertificate cert =
      search_n_star(sys, search_cap, run.base_points, spacing);
  Table search{"n_star_search", {"n", "K", "mean_log_c", "stderr_log_c"}, {}};
  for (std::size_t i = 0; i < cert.tried_n.size(); ++i)
    search.rows.push_back({fmt(cert.tried_n[i]), fmt(run.base_points),
                           fmt(cert.tried_mean[i]), fmt(cert.tried_stderr[i])});
  out.tables.push_back(std::move(search));

  out.tables.push_back(
      {"certificate",
       {"certified", "n_star", "K", "mean_log_c", "stderr_log_c", "gamma"},
       {{fmt(cert.certified), fmt(cert.n_star), fmt(run.base_points),
         fmt(cert.mean_log_c), fmt(cert.stderr_log_c), fmt(cert.gamma)}}});

  const SufficientMargins margins =
      sufficient_conditions(sys, run.base_points, spacing);
  out.tables.push_back(
      {"sufficient_margins",
       {"K", "margin_n1", "margin_general", "margin_xi", "xi_hat",
        "any_holds"},
       {{fmt(run.base_points), fmt(margins.margin_n1),
         fmt(margins.margin_general), fmt(margins.margin_xi),
         fmt(margins.xi_hat), fmt(margins.any_holds)}}});

  json summary;
  summary["command"] = "certify";
  summary["certified"] = cert.certified;
  summary["n_star"] = cert.n_star;
  summary["mean_log_c"] = cert.mean_log_c;
  summary["stderr_log_c"] = cert.stderr_log_c;
  summary["gamma"] = cert.gamma;
  summary["K"] = run.base_points;
  summary["margin_n1"] = margins.margin_n1;
  summary["margin_general"] = margins.margin_general;
  summary["margin_xi"] = margins.margin_xi;
  summary["sufficient_condition_holds"] = margins.any_holds;

  if (cert.certified) {
    const ConeParamSeries series = cone_param_series(sys, cert, 8);
    Table cone{"cone_parameters",
               {"fiber", "n_star", "a", "terms", "tail_bound"},
               {}};
    Table tt{"temperedness", {"fiber", "n_star", "log_a"}, {}};
    std::vector<double> xs;
    std::vector<double> log_a;
    for (std::size_t k = 0; k < series.fibers.size(); ++k) {
      cone.rows.push_back({fmt(series.fibers[k]), fmt(cert.n_star),
                           fmt(series.a[k]), fmt(series.terms[k]),
                           fmt(series.tail_bound[k])});
      xs.push_back(static_cast<double>(series.fibers[k]));
      log_a.push_back(std::log(series.a[k]));
      tt.rows.push_back(
          {fmt(series.fibers[k]), fmt(cert.n_star), fmt(log_a.back())});
    }
    out.tables.push_back(std::move(cone));
    out.tables.push_back(std::move(tt));
    summary["temperedness_slope"] = fit_line(xs, log_a).slope;
  }

  const KingmanProfile king =
      kingman_profile(sys, profile_cap, run.base_points, spacing);
  Table kt{"kingman_profile",
           {"n", "K", "beta_f_n", "beta_stderr", "minus_phi_minus_n",
            "phi_stderr"},
           {}};
  for (std::size_t i = 0; i < king.ns.size(); ++i)
    kt.rows.push_back({fmt(king.ns[i]), fmt(run.base_points),
                       fmt(king.beta_f_n[i]), fmt(king.beta_stderr[i]),
                       fmt(king.minus_phi_minus_n[i]),
                       fmt(king.phi_stderr[i])});
  out.tables.push_back(std::move(kt));
  summary["phi_plus"] = king.phi_plus;

  const XiGrowth xi = xi_growth_check(sys, xi_cap, run.base_points, spacing);
  Table xt{"xi_growth", {"n", "K", "mean_xi"}, {}};
  for (std::size_t i = 0; i < xi.ns.size(); ++i)
    xt.rows.push_back({fmt(xi.ns[i]), fmt(run.base_points), fmt(xi.mean_xi[i])});
  out.tables.push_back(std::move(xt));
  summary["xi_within_bound"] = xi.within_bound;
  summary["xi_growth_rate"] = xi.growth_rate;

  out.summary_json = summary.dump(2);
  return out;
}

RunResult run_density(const LoadedConfig& cfg) {
  const System& sys = cfg.system;
  const RunParams& run = cfg.run;
  RunResult out;
  out.command = "density";

  const DensityResult d = equivariant_density(sys, run.fiber, run.depth);
  const Interval& base = sys.family.base;
  constexpr int kProfilePoints = 256;
  Table profile{"density_profile", {"fiber", "depth", "nodes", "x", "q"}, {}};
  for (int k = 0; k <= kProfilePoints; ++k) {
    const double x =
        base.lo + base.length() * static_cast<double>(k) / kProfilePoints;
    profile.rows.push_back({fmt(run.fiber), fmt(run.depth),
                            fmt(sys.resolution), fmt(x), fmt(d.density(x))});
  }
  out.tables.push_back(std::move(profile));

  const double sup = esssup(d.density);
  const double var = variation(d.density);
  out.tables.push_back(
      {"density_diagnostics",
       {"fiber", "depth", "nodes", "log_scale", "cauchy_gap", "esssup",
        "variation", "cone_ratio"},
       {{fmt(run.fiber), fmt(run.depth), fmt(sys.resolution),
         fmt(d.log_scale), fmt(d.cauchy_gap), fmt(sup), fmt(var),
         fmt(cone_ratio(d.density))}}});

  json summary;
  summary["command"] = "density";
  summary["fiber"] = run.fiber;
  summary["depth"] = run.depth;
  summary["nodes"] = sys.resolution;
  summary["log_scale"] = d.log_scale;
  summary["cauchy_gap"] = d.cauchy_gap;
  summary["esssup"] = sup;
  summary["variation"] = var;
  out.summary_json = summary.dump(2);
  return out;
}

RunResult run_conformal(const LoadedConfig& cfg) {
  const System& sys = cfg.system;
  const RunParams& run = cfg.run;
  RunResult out;
  out.command = "conformal";

  const NuTable table = nu_table(sys, run.fiber, run.depth, sys.nu_cells);
  Table cdf{"conformal_cdf", {"fiber", "depth", "cells", "k", "x", "cdf"}, {}};
  const double h = table.base.length() / table.cells;
  for (int k = 0; k <= table.cells; ++k)
    cdf.rows.push_back({fmt(run.fiber), fmt(run.depth), fmt(table.cells),
                        fmt(k), fmt(table.base.lo + k * h),
                        fmt(table.cdf[static_cast<std::size_t>(k)])});
  out.tables.push_back(std::move(cdf));

  const auto rows = duality_check(sys, run.fiber, 8, run.n, run.depth);
  Table dual{"duality",
             {"fiber", "depth", "anchor_depth", "nu_q", "nu_q_next",
              "lambda_plus", "lambda_minus", "ratio", "deviation"},
             {}};
  double max_dev = 0.0;
  for (const auto& r : rows) {
    const double dev = std::abs(r.ratio - 1.0);
    max_dev = std::max(max_dev, dev);
    dual.rows.push_back({fmt(r.fiber), fmt(run.n), fmt(run.depth),
                         fmt(r.nu_q), fmt(r.nu_q_next), fmt(r.lambda_plus),
                         fmt(r.lambda_minus), fmt(r.ratio), fmt(dev)});
  }
  out.tables.push_back(std::move(dual));

  json summary;
  summary["command"] = "conformal";
  summary["fiber"] = run.fiber;
  summary["depth"] = run.depth;
  summary["cells"] = table.cells;
  summary["duality_fibers"] = rows.size();
  summary["max_duality_deviation"] = max_dev;
  out.summary_json = summary.dump(2);
  return out;
}

RunResult run_invariant(const LoadedConfig& cfg) {
  const System& sys = cfg.system;
  const RunParams& run = cfg.run;
  RunResult out;
  out.command = "invariant";

  // matched terminal fiber: the functional at `fiber` folds one step deeper,
  // so both sides of the invariance identity share every tail operation
  const ConformalFunctional nu0(sys, run.fiber, run.depth + 1);
  const ConformalFunctional nu1(sys, run.fiber + 1, run.depth);
  const FiberChain chain(sys, run.fiber, 1, run.depth);
  const PiecewiseFn& q0 = chain.density(run.fiber);
  const PiecewiseFn& q1 = chain.density(run.fiber + 1);
  const int symbol = sys.driver.symbol_at(run.fiber);

  Table inv{"invariance",
            {"fiber", "depth", "observable", "mu_fiber", "mu_next",
             "mu_composed", "residual"},
            {}};
  double max_resid = 0.0;
  for (const auto& [name, f] : observable_panel(sys)) {
    const double mu_f = invariant_measure_eval(sys, nu0, q0, f);
    const double mu_next = invariant_measure_eval(sys, nu1, q1, f);
    const PiecewiseFn composed = compose_with_map(sys, symbol, f);
    const double mu_comp = invariant_measure_eval(sys, nu0, q0, composed);
    const double resid = std::abs(mu_next - mu_comp);
    max_resid = std::max(max_resid, resid);
    inv.rows.push_back({fmt(run.fiber), fmt(run.depth), name, fmt(mu_f),
                        fmt(mu_next), fmt(mu_comp), fmt(resid)});
  }
  const std::size_t observable_count = inv.rows.size();
  out.tables.push_back(std::move(inv));

  json summary;
  summary["command"] = "invariant";
  summary["fiber"] = run.fiber;
  summary["depth"] = run.depth;
  summary["observables"] = observable_count;
  summary["max_invariance_residual"] = max_resid;
  out.summary_json = summary.dump(2);
  return out;
}

RunResult run_lyapunov(const LoadedConfig& cfg) {
  const System& sys = cfg.system;
  const RunParams& run = cfg.run;
  RunResult out;
  out.command = "lyapunov";

  const LyapunovEstimate est =
      lyapunov_exponent(sys, run.n, run.base_points);
  out.tables.push_back(
      {"lyapunov",
       {"n", "K", "einf_mean", "einf_stderr", "bv_mean", "bv_stderr"},
       {{fmt(est.n), fmt(est.base_count), fmt(est.einf_mean),
         fmt(est.einf_stderr), fmt(est.bv_mean), fmt(est.bv_stderr)}}});

  Table samples{"lyapunov_samples", {"n", "sample", "einf", "bv"}, {}};
  for (std::size_t i = 0; i < est.einf_samples.size(); ++i)
    samples.rows.push_back({fmt(est.n), fmt(static_cast<int>(i)),
                            fmt(est.einf_samples[i]), fmt(est.bv_samples[i])});
  out.tables.push_back(std::move(samples));

  json summary;
  summary["command"] = "lyapunov";
  summary["n"] = est.n;
  summary["K"] = est.base_count;
  summary["lambda_einf"] = est.einf_mean;
  summary["lambda_einf_stderr"] = est.einf_stderr;
  summary["lambda_bv"] = est.bv_mean;
  summary["lambda_bv_stderr"] = est.bv_stderr;
  out.summary_json = summary.dump(2);
  return out;
}

RunResult run_correlations(const LoadedConfig& cfg) {
  const System& sys = cfg.system;
  const RunParams& run = cfg.run;
  RunResult out;
  out.command = "correlations";

  const PiecewiseFn x = PiecewiseFn::affine(sys.family.base, 1.0, 0.0);
  const CorrelationResult res =
      correlation_decay(sys, run.fiber, run.depth, x, x, run.n);
  Table pts{"correlations", {"fiber", "depth", "n", "cov"}, {}};
  for (const auto& p : res.points)
    pts.rows.push_back({fmt(run.fiber), fmt(run.depth), fmt(p.n), fmt(p.cov)});
  out.tables.push_back(std::move(pts));

  json summary;
  summary["command"] = "correlations";
  summary["fiber"] = run.fiber;
  summary["depth"] = run.depth;
  summary["n_max"] = run.n;
  summary["observable"] = "f = h = x";
  summary["rate"] = res.rate;
  summary["fit_corr"] = res.fit_corr;
  summary["fit_points"] = res.fit_points;
  out.summary_json = summary.dump(2);
  return out;
}

RunResult run_residual(const LoadedConfig& cfg) {
  const System& sys = cfg.system;
  const RunParams& run = cfg.run;
  RunResult out;
  out.command = "residual";
  const int n_max = std::min(run.n, 20);

  const ResidualResult psi = rpf_residual_psi(sys, run.fiber, n_max, run.depth);
  Table pt{"residual_psi", {"fiber", "depth", "n", "sup_norm"}, {}};
  double psi_max = 0.0;
  for (const auto& p : psi.points) {
    psi_max = std::max(psi_max, p.sup_norm);
    pt.rows.push_back(
        {fmt(run.fiber), fmt(run.depth), fmt(p.n), fmt(p.sup_norm)});
  }
  out.tables.push_back(std::move(pt));

  const PiecewiseFn obs = PiecewiseFn::affine(sys.family.base, 0.5, 1.0);
  const ResidualResult fr = rpf_residual(sys, run.fiber, obs, n_max, run.depth);
  Table ft{"residual_observable", {"fiber", "depth", "n", "sup_norm"}, {}};
  for (const auto& p : fr.points)
    ft.rows.push_back(
        {fmt(run.fiber), fmt(run.depth), fmt(p.n), fmt(p.sup_norm)});
  out.tables.push_back(std::move(ft));

  json summary;
  summary["command"] = "residual";
  summary["fiber"] = run.fiber;
  summary["depth"] = run.depth;
  summary["n_max"] = n_max;
  summary["psi_max_sup_norm"] = psi_max;
  summary["observable"] = "1 + x/2";
  summary["observable_rate"] = fr.rate;
  summary["observable_log_slope"] = fr.log_slope;
  summary["observable_fit_corr"] = fr.fit_corr;
  out.summary_json = summary.dump(2);
  return out;
}

RunResult run_escape(const LoadedConfig& cfg) {
  const System& sys = cfg.system;
  const RunParams& run = cfg.run;
  if (cfg.escape.epsilons.empty())
    fail_schema("the escape command needs an escape section in the config");
  RunResult out;
  out.command = "escape";

  const LambdaEpsilonTable table =
      lambda_vs_epsilon(sys, cfg.escape, run.n, run.base_points, run.fiber,
                        run.n, run.depth);
  Table lam{"lambda_vs_epsilon",
            {"epsilon", "n", "K", "lambda_einf", "lambda_stderr"},
            {}};
  for (const auto& r : table.rows)
    lam.rows.push_back({fmt(r.epsilon), fmt(run.n), fmt(run.base_points),
                        fmt(r.lambda_mean), fmt(r.lambda_stderr)});
  out.tables.push_back(std::move(lam));

  Table resid{"escape_identity",
              {"epsilon_lo", "epsilon_hi", "n", "K", "lambda_gap",
               "identity_residual"},
              {}};
  for (std::size_t e = 0; e + 1 < table.rows.size(); ++e)
    resid.rows.push_back(
        {fmt(table.rows[e].epsilon), fmt(table.rows[e + 1].epsilon),
         fmt(run.n), fmt(run.base_points),
         fmt(table.rows[e].lambda_mean - table.rows[e + 1].lambda_mean),
         fmt(table.pair_residuals[e])});
  out.tables.push_back(std::move(resid));

  const EscapeCurve curve = survivor_mass_curve(
      system_at_epsilon(sys, cfg.escape, 0),
      system_at_epsilon(sys, cfg.escape, 1), run.fiber, run.n, run.depth);
  Table mass{"survivor_mass", {"fiber", "depth", "n", "mass"}, {}};
  for (const auto& p : curve.points)
    mass.rows.push_back(
        {fmt(run.fiber), fmt(run.depth), fmt(p.n), fmt(p.mass)});
  out.tables.push_back(std::move(mass));

  json summary;
  summary["command"] = "escape";
  summary["n"] = run.n;
  summary["K"] = run.base_points;
  summary["grid_points"] = table.rows.size();
  summary["monotone_within_2se"] = table.monotone_within_2se;
  summary["pair_residuals"] = table.pair_residuals;
  summary["first_pair_rate"] = curve.fitted_rate;
  summary["first_pair_fit_corr"] = curve.fit_corr;
  out.summary_json = summary.dump(2);
  return out;
}

RunResult run_oracle(const LoadedConfig& cfg) {
  const System& sys = cfg.system;
  const RunParams& run = cfg.run;
  RunResult out;
  out.command = "oracle";

  const OracleLyapunov orl =
      oracle_lyapunov(sys, cfg.ulam_cells, run.n, run.base_points);
  const LyapunovEstimate main = lyapunov_exponent(sys, run.n, run.base_points);
  const double diff = std::abs(main.einf_mean - orl.einf_mean);
  out.tables.push_back(
      {"rate_comparison",
       {"n", "K", "cells", "oracle_l1", "oracle_l1_stderr", "oracle_einf",
        "oracle_einf_stderr", "main_einf", "main_einf_stderr",
        "abs_diff_einf"},
       {{fmt(run.n), fmt(run.base_points), fmt(cfg.ulam_cells),
         fmt(orl.l1_mean), fmt(orl.l1_stderr), fmt(orl.einf_mean),
         fmt(orl.einf_stderr), fmt(main.einf_mean), fmt(main.einf_stderr),
         fmt(diff)}}});

  const DensityResult d = equivariant_density(sys, run.fiber, run.depth);
  Table dens{"density_l1", {"fiber", "depth", "cells", "l1_distance"}, {}};
  json dens_summary = json::object();
  for (const int cells : {256, 1024, 4096}) {
    const auto v = oracle_density(sys, run.fiber, run.depth, cells);
    const Interval& base = sys.family.base;
    const double h = base.length() / cells;
    double l1 = 0.0;
    for (int k = 0; k < cells; ++k) {
      const double mid = base.lo + (k + 0.5) * h;
      l1 += std::abs(d.density(mid) - v[static_cast<std::size_t>(k)]) * h;
    }
    dens.rows.push_back({fmt(run.fiber), fmt(run.depth), fmt(cells), fmt(l1)});
    dens_summary[std::to_string(cells)] = l1;
  }
  out.tables.push_back(std::move(dens));

  json summary;
  summary["command"] = "oracle";
  summary["n"] = run.n;
  summary["K"] = run.base_points;
  summary["cells"] = cfg.ulam_cells;
  summary["oracle_einf"] = orl.einf_mean;
  summary["oracle_l1"] = orl.l1_mean;
  summary["main_einf"] = main.einf_mean;
  summary["abs_diff_einf"] = diff;
  summary["density_l1"] = dens_summary;
  out.summary_json = summary.dump(2);
  return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "certify",      "density",  "conformal", "invariant", "lyapunov",
      "correlations", "residual", "escape",    "oracle"};
  return names;
}

RunResult run_command(const LoadedConfig& cfg, const std::string& command) {
  if (command == "certify") return run_certify(cfg);
  if (command == "density") return run_density(cfg);
  if (command == "conformal") return run_conformal(cfg);
  if (command == "invariant") return run_invariant(cfg);
  if (command == "lyapunov") return run_lyapunov(cfg);
  if (command == "correlations") return run_correlations(cfg);
  if (command == "residual") return run_residual(cfg);
  if (command == "escape") return run_escape(cfg);
  if (command == "oracle") return run_oracle(cfg);
  fail_schema("unknown command '" + command + "'");
}

}  // namespace rpf
