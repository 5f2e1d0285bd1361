#include <doctest.h>

#include <cmath>
#include <vector>

#include "rpf/interval_fn.hpp"

using namespace rpf;

namespace {

const Interval kUnit{0.0, 1.0};

}  // namespace

TEST_CASE("constant and affine constructors evaluate exactly") {
  const auto c = PiecewiseFn::constant(kUnit, 3.5);
  CHECK(c(0.0) == 3.5);
  CHECK(c(0.7) == 3.5);
  CHECK(c(1.0) == 3.5);

  const auto f = PiecewiseFn::affine(kUnit, 2.0, -0.5);
  CHECK(f(0.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(f(0.25) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(f(1.0) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("evaluation outside the base interval is an error") {
  const auto f = PiecewiseFn::affine(kUnit, 1.0, 0.0);
  CHECK_THROWS_AS((void)f.eval(-0.1, Side::Right), Error);
  CHECK_THROWS_AS((void)f.eval(1.1, Side::Left), Error);
  // At the endpoints the adjacent interior limit is returned for either side.
  CHECK(f.eval(0.0, Side::Left) == f.eval(0.0, Side::Right));
  CHECK(f.eval(1.0, Side::Right) == f.eval(1.0, Side::Left));
}

TEST_CASE("indicator has the right one-sided limits at its jumps") {
  const auto f = PiecewiseFn::indicator(kUnit, Interval{0.25, 0.5});
  CHECK(f(0.1) == 0.0);
  CHECK(f(0.3) == 1.0);
  CHECK(f(0.7) == 0.0);
  CHECK(f.eval(0.25, Side::Left) == 0.0);
  CHECK(f.eval(0.25, Side::Right) == 1.0);
  CHECK(f.eval(0.5, Side::Left) == 1.0);
  CHECK(f.eval(0.5, Side::Right) == 0.0);
  // operator() takes the right limit except at the top endpoint.
  CHECK(f(0.25) == 1.0);
  CHECK(f(0.5) == 0.0);

  // The window is clipped to the base before use.
  const auto g = PiecewiseFn::indicator(kUnit, Interval{-1.0, 0.3}, 2.0, -1.0);
  CHECK(g(0.1) == 2.0);
  CHECK(g(0.5) == -1.0);
}

TEST_CASE("variation and essential bounds on hand cases") {
  const auto ind = PiecewiseFn::indicator(kUnit, Interval{0.25, 0.5});
  CHECK(variation(ind) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(essinf(ind) == 0.0);
  CHECK(esssup(ind) == 1.0);
  CHECK(essinf_on(ind, IntervalSet{Interval{0.3, 0.4}}) == 1.0);
  CHECK(esssup_on(ind, IntervalSet{Interval{0.6, 0.9}}) == 0.0);

  const auto f = PiecewiseFn::affine(kUnit, 2.0, 0.0);
  CHECK(variation(f) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(variation_on(f, IntervalSet{Interval{0.25, 0.75}}) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(essinf(f) == doctest::Approx(0.0));
  CHECK(esssup(f) == doctest::Approx(2.0));
}

TEST_CASE("jumps live at breakpoints between pieces") {
  const PiecewiseFn f(kUnit, {0.0, 0.5, 1.0},
                      {Piece{AffinePiece{0.0, 1.0}},
                       Piece{AffinePiece{0.0, 2.0}}});
  CHECK(f.eval(0.5, Side::Left) == 1.0);
  CHECK(f.eval(0.5, Side::Right) == 2.0);
  CHECK(f(0.25) == 1.0);
  CHECK(f(0.75) == 2.0);
  CHECK(variation(f) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(essinf(f) == 1.0);
  CHECK(esssup(f) == 2.0);
  CHECK(integral_lebesgue(f) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("combine is exact on affine inputs") {
  const auto f = PiecewiseFn::affine(kUnit, 1.0, 0.0);
  const auto g = PiecewiseFn::affine(kUnit, 3.0, 0.5);
  const auto h = combine(2.0, f, -1.0, g);
  // 2 x - (3 x + 0.5) = -x - 0.5
  for (const double x : {0.0, 0.3, 0.6, 1.0})
    CHECK(h(x) == doctest::Approx(-x - 0.5).epsilon(1e-15));
  const auto sum = combine(1.0, f, 1.0,
                           PiecewiseFn::indicator(kUnit, Interval{0.5, 1.0}));
  CHECK(sum(0.25) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(sum(0.75) == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(sum.eval(0.5, Side::Left) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sum.eval(0.5, Side::Right) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("pointwise product of affine pieces samples accurately") {
  const auto f = PiecewiseFn::affine(kUnit, 1.0, 0.0);
  const auto fsq = pointwise_mul(f, f);
  for (const double x : {0.1, 0.33, 0.5, 0.77, 0.9})
    CHECK(fsq(x) == doctest::Approx(x * x).epsilon(1e-6));
  CHECK(integral_lebesgue(fsq) == doctest::Approx(1.0 / 3.0).epsilon(1e-7));

  // Multiplying by a constant keeps affine pieces exact.
  const auto half = pointwise_mul(f, PiecewiseFn::constant(kUnit, 0.5));
  CHECK(half(0.6) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(integral_lebesgue(half) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("integral of an indicator equals the window length") {
  const auto f = PiecewiseFn::indicator(kUnit, Interval{0.2, 0.7});
  CHECK(integral_lebesgue(f) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("consolidate preserves values and protected jumps") {
  // Build a function with many redundant breakpoints.
  std::vector<double> breaks;
  std::vector<Piece> pieces;
  breaks.push_back(0.0);
  for (int k = 1; k <= 64; ++k) {
    breaks.push_back(static_cast<double>(k) / 64.0);
    pieces.push_back(Piece{AffinePiece{1.0, 0.0}});
  }
  const PiecewiseFn f(kUnit, breaks, pieces);
  const auto g = consolidate(f, 256, {0.5});
  CHECK(sup_distance(f, g) <= 1e-10);

  const auto ind = PiecewiseFn::indicator(kUnit, Interval{0.5, 1.0});
  const auto ind2 = consolidate(ind, 64, {0.5});
  CHECK(ind2.eval(0.5, Side::Left) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ind2.eval(0.5, Side::Right) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sup_distance sees one-sided disagreements") {
  const auto a = PiecewiseFn::indicator(kUnit, Interval{0.25, 0.5});
  const auto b = PiecewiseFn::indicator(kUnit, Interval{0.25, 0.5}, 2.0, 0.0);
  CHECK(sup_distance(a, a) == 0.0);
  CHECK(sup_distance(a, b) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("merged_breaks dedups nearly identical breakpoints") {
  const PiecewiseFn a(kUnit, {0.0, 0.5, 1.0},
                      {Piece{AffinePiece{0.0, 1.0}},
                       Piece{AffinePiece{0.0, 2.0}}});
  const PiecewiseFn b(kUnit, {0.0, 0.5 + 1e-15, 1.0},
                      {Piece{AffinePiece{0.0, 3.0}},
                       Piece{AffinePiece{0.0, 4.0}}});
  const auto merged = merged_breaks(a, b);
  std::size_t count_half = 0;
  for (const double x : merged)
    if (std::abs(x - 0.5) < 1e-9) ++count_half;
  CHECK(count_half == 1);
}

TEST_CASE("prorated_nodes scales with piece length and floors at the minimum") {
  CHECK(prorated_nodes(4096, 1.0, 1.0) == 4097);
  CHECK(prorated_nodes(4096, 0.5, 1.0) == 2049);
  CHECK(prorated_nodes(4096, 1e-9, 1.0) == kMinPieceNodes);
}
