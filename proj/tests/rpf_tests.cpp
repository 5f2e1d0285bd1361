#include <doctest.h>

#include <cmath>
#include <vector>

#include "rpf/rpf.hpp"

using namespace rpf;

namespace {

const Interval kUnit{0.0, 1.0};

OpenMap affine_full_map(int branch_count) {
  std::vector<Branch> branches;
  const double w = 1.0 / branch_count;
  for (int i = 0; i < branch_count; ++i)
    branches.emplace_back(Interval{i * w, (i + 1) * w},
                          AffineBranch{static_cast<double>(branch_count),
                                       -static_cast<double>(i)});
  return OpenMap(kUnit, std::move(branches), {});
}

System doubling_system(double log_g) {
  std::vector<OpenMap> maps;
  maps.push_back(affine_full_map(2));
  return System{MapFamily{kUnit, std::move(maps)},
                ConstantPotential{{log_g}}, Driver(IidDriver{{1.0}}, 1)};
}

System mixed_system(std::uint64_t seed) {
  std::vector<OpenMap> maps;
  maps.push_back(affine_full_map(2));
  maps.push_back(affine_full_map(3));
  return System{MapFamily{kUnit, std::move(maps)}, ConstantPotential{{0.0}},
                Driver(IidDriver{{0.5, 0.5}}, seed)};
}

}  // namespace

TEST_CASE("equivariant density of unit-weight doubling is flat") {
  const System sys = doubling_system(0.0);
  const DensityResult dr = equivariant_density(sys, 0, 30);
  CHECK(essinf(dr.density) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(esssup(dr.density) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(dr.cauchy_gap <= 1e-12);
  CHECK(dr.log_scale == doctest::Approx(30 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("conformal functional of half-weight doubling is Lebesgue") {
  const System sys = doubling_system(-std::log(2.0));
  const ConformalFunctional nu(sys, 0, 40);
  // Indicators measure interval length.
  for (const auto& ab : std::vector<std::pair<double, double>>{
           {0.0, 0.5}, {0.2, 0.7}, {0.13, 0.17}, {0.0, 1.0}}) {
    const auto ind =
        PiecewiseFn::indicator(kUnit, Interval{ab.first, ab.second});
    CHECK(nu.ratio(ind) ==
          doctest::Approx(ab.second - ab.first).epsilon(1e-9));
  }
  // Signed evaluation is consistent with shifting by constants.
  const auto f = PiecewiseFn::affine(kUnit, 2.0, -1.0);
  CHECK(nu(f) == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(nu.log_einf_one() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("multiplier ladder of unit-weight doubling is exactly two") {
  const System sys = doubling_system(0.0);
  const MultiplierLadder ml = multiplier_ladder(sys, 0, 6, 30);
  REQUIRE(ml.lambda_plus.size() == 6);
  for (const double lp : ml.lambda_plus)
    CHECK(lp == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("fiber chain pushes densities forward equivariantly") {
  const System sys = mixed_system(77);
  FiberChain chain(sys, 0, 6, 30);
  for (int j = 0; j < 5; ++j) {
    const auto& q = chain.density(j);
    const auto& q_next = chain.density(j + 1);
    const double lam = chain.lambda_minus(j);
    CHECK(lam > 0.0);
    // L q_j / lambda_j should reproduce q_{j+1} up to its normalization.
    const auto pushed =
        scaled(apply_transfer(sys, sys.driver.symbol_at(j), q), 1.0 / lam);
    const double scale = esssup(pushed);
    CHECK(sup_distance(scaled(pushed, 1.0 / scale),
                       scaled(q_next, 1.0 / esssup(q_next))) <= 1e-10);
  }
  CHECK(chain.log_lambda_sum(0, 5) > 0.0);
}

TEST_CASE("duality between conformal scales and density multipliers") {
  const System sys = mixed_system(31);
  const auto rows = duality_check(sys, 0, 6, 25, 25);
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.lambda_plus > 1.0);
    CHECK(r.lambda_minus > 1.0);
  }
}

TEST_CASE("invariant measure of unit-weight doubling is Lebesgue") {
  const System sys = doubling_system(0.0);
  const ConformalFunctional nu(sys, 0, 40);
  const DensityResult dr = equivariant_density(sys, 0, 30);
  const auto x = PiecewiseFn::affine(kUnit, 1.0, 0.0);
  CHECK(invariant_measure_eval(sys, nu, dr.density, x) ==
        doctest::Approx(0.5).epsilon(1e-8));
  const auto ind = PiecewiseFn::indicator(kUnit, Interval{0.25, 0.5});
  CHECK(invariant_measure_eval(sys, nu, dr.density, ind) ==
        doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("conformal CDF table of half-weight doubling is uniform") {
  const System sys = doubling_system(-std::log(2.0));
  const NuTable table = nu_table(sys, 0, 40, 64);
  REQUIRE(table.cdf.size() == 65);
  CHECK(table.cdf.front() == doctest::Approx(0.0));
  CHECK(table.cdf.back() == doctest::Approx(1.0).epsilon(1e-10));
  for (std::size_t k = 0; k <= 64; ++k)
    CHECK(table.cdf[k] ==
          doctest::Approx(static_cast<double>(k) / 64.0).epsilon(1e-8));
  const auto x = PiecewiseFn::affine(kUnit, 1.0, 0.0);
  CHECK(nu_integrate(table, x) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("correlations of the doubling map decay at rate one half") {
  const System sys = doubling_system(-std::log(2.0));
  const auto x = PiecewiseFn::affine(kUnit, 1.0, 0.0);
  const CorrelationResult cr = correlation_decay(sys, 0, 40, x, x, 12);
  REQUIRE(cr.points.size() == 12);
  // Cov_n = 2^{-n}/12 for f = h = x under Lebesgue.
  CHECK(cr.points[0].cov == doctest::Approx(1.0 / 24.0).epsilon(1e-6));
  CHECK(cr.points[1].cov == doctest::Approx(1.0 / 48.0).epsilon(1e-6));
  CHECK(cr.rate == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(cr.fit_corr < -0.999);
}

TEST_CASE("normalized transfer residuals vanish for the exact eigenfunction") {
  const System sys = doubling_system(0.0);
  const ResidualResult rr = rpf_residual_psi(sys, 0, 8, 30);
  REQUIRE(rr.points.size() == 8);
  for (const auto& p : rr.points) CHECK(p.sup_norm <= 1e-11);
}

TEST_CASE("residuals of generic observables decay geometrically") {
  const System sys = doubling_system(0.0);
  const auto f = PiecewiseFn::affine(kUnit, 0.4, 1.0);
  const ResidualResult rr = rpf_residual(sys, 0, f, 10, 30);
  REQUIRE(rr.points.size() == 10);
  // Doubling halves the defect each step: back/front = 2^{-9}.
  CHECK(rr.points.back().sup_norm ==
        doctest::Approx(rr.points.front().sup_norm / 512.0).epsilon(1e-6));
  CHECK(rr.log_slope == doctest::Approx(-std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("Lyapunov estimators agree on the autonomous doubling map") {
  const System sys = doubling_system(0.0);
  const LyapunovEstimate le = lyapunov_exponent(sys, 30, 4, 2);
  CHECK(le.einf_mean == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(le.bv_mean == doctest::Approx(std::log(2.0)).epsilon(1e-3));
  CHECK(le.einf_stderr == doctest::Approx(0.0));
  REQUIRE(le.einf_samples.size() == 4);
}

TEST_CASE("pullback composition matches pointwise evaluation") {
  const System sys = doubling_system(0.0);
  const auto f = PiecewiseFn::affine(kUnit, 1.0, 0.0);
  const auto comp = compose_with_map(sys, 0, f);
  for (const double t : {0.1, 0.3, 0.6, 0.9}) {
    const double tx = t < 0.5 ? 2.0 * t : 2.0 * t - 1.0;
    CHECK(comp(t) == doctest::Approx(tx).epsilon(1e-12));
  }
}

TEST_CASE("normalized forward fold reports a unit supremum") {
  const System sys = mixed_system(5);
  const auto it = forward_fold(sys, 0, 12,
                               PiecewiseFn::constant(kUnit, 1.0));
  CHECK(esssup(it.fn) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(it.log_scale > 0.0);
}
