#include <doctest.h>

#include <cmath>
#include <vector>

#include "rpf/random_map.hpp"

using namespace rpf;

namespace {

const Interval kUnit{0.0, 1.0};

// Doubling map as two affine full branches, with an optional hole.
OpenMap make_doubling(IntervalSet hole = {}) {
  std::vector<Branch> branches;
  branches.emplace_back(Interval{0.0, 0.5}, AffineBranch{2.0, 0.0});
  branches.emplace_back(Interval{0.5, 1.0}, AffineBranch{2.0, -1.0});
  return OpenMap(kUnit, std::move(branches), std::move(hole));
}

MapFamily doubling_family(IntervalSet hole = {}) {
  std::vector<OpenMap> maps;
  maps.push_back(make_doubling(std::move(hole)));
  return MapFamily{kUnit, std::move(maps)};
}

}  // namespace

TEST_CASE("affine branch round-trips forward and inverse") {
  const Branch b(Interval{0.6, 0.7}, AffineBranch{10.0, -6.0});
  CHECK(b.forward(0.6) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(b.forward(0.7) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.increasing());
  for (const double x : {0.6, 0.6321, 0.6777, 0.7}) {
    const double y = b.forward(x);
    CHECK(b.invert(y, 1e-13) == doctest::Approx(x).epsilon(1e-12));
  }
  CHECK(b.abs_deriv_min() == doctest::Approx(10.0));
  CHECK(b.abs_deriv_max() == doctest::Approx(10.0));
}

TEST_CASE("power branch round-trips through Newton inversion") {
  // T(x) = c |x - x0|^p with the branch increasing away from x0.
  const double c = 5.6234;
  const Branch b(Interval{0.7, 0.8}, PowerBranch{c, 0.7, 0.75});
  CHECK(b.forward(0.7) == doctest::Approx(0.0));
  for (const double x : {0.701, 0.733, 0.7654, 0.8}) {
    const double y = b.forward(x);
    CHECK(b.invert(y, 1e-13) == doctest::Approx(x).epsilon(1e-10));
  }
}

TEST_CASE("quadratic branch is monotone off the vertex and inverts") {
  // T(x) = alpha (x - r0)(x - r1), increasing right of the vertex.
  const double alpha = 1.0 / (0.3 * 0.2);
  const Branch b(Interval{0.1, 0.3}, QuadraticBranch{alpha, 0.0, 0.1});
  CHECK(b.forward(0.1) == doctest::Approx(0.0));
  CHECK(b.forward(0.3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.increasing());
  for (const double x : {0.12, 0.2, 0.28}) {
    const double y = b.forward(x);
    CHECK(b.invert(y, 1e-13) == doctest::Approx(x).epsilon(1e-10));
  }
}

TEST_CASE("intermittent branch matches its closed form at unit exponent") {
  const Branch b(Interval{0.0, 0.5}, MannevillePomeauBranch{1.0});
  for (const double x : {0.0, 0.1, 0.25, 0.4, 0.5}) {
    CHECK(b.forward(x) == doctest::Approx(x * (1.0 + 2.0 * x)).epsilon(1e-15));
    CHECK(b.derivative(x) == doctest::Approx(1.0 + 4.0 * x).epsilon(1e-15));
  }
  for (const double x : {0.05, 0.2, 0.37, 0.49}) {
    const double y = b.forward(x);
    CHECK(b.invert(y, 1e-13) == doctest::Approx(x).epsilon(1e-13));
  }
  // Neutral fixed point: derivative 1 at the origin.
  CHECK(b.derivative(0.0) == doctest::Approx(1.0));

  const Branch frac(Interval{0.0, 0.5}, MannevillePomeauBranch{0.6});
  for (const double x : {0.07, 0.22, 0.41}) {
    const double y = frac.forward(x);
    CHECK(frac.invert(y, 1e-13) == doctest::Approx(x).epsilon(1e-11));
  }
}

TEST_CASE("decreasing affine branch reports a proper image") {
  const Branch b(Interval{0.0, 0.5}, AffineBranch{-2.0, 1.0});
  CHECK_FALSE(b.increasing());
  CHECK(b.image().lo == doctest::Approx(0.0));
  CHECK(b.image().hi == doctest::Approx(1.0));
  const double y = b.forward(0.2);
  CHECK(y == doctest::Approx(0.6));
  CHECK(b.invert(0.6, 1e-13) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("closed doubling map has two full branches and full survivor") {
  const OpenMap m = make_doubling();
  CHECK(m.elements().size() == 2);
  CHECK(m.full_count() == 2);
  CHECK(m.longest_partial_run() == 0);
  CHECK(m.has_protected_full_branch());
  const IntervalSet s = m.survivor();
  REQUIRE(s.size() == 1);
  CHECK(total_length(s) == doctest::Approx(1.0));
}

TEST_CASE("doubling with a hole splits the level-1 partition as expected") {
  const OpenMap m = make_doubling({Interval{0.25, 0.375}});
  // Elements: [0,1/4] and [3/8,1/2] from the first branch, [1/2,1] full.
  REQUIRE(m.elements().size() == 3);
  CHECK(m.elements()[0].dom.lo == doctest::Approx(0.0));
  CHECK(m.elements()[0].dom.hi == doctest::Approx(0.25));
  CHECK_FALSE(m.elements()[0].full);
  CHECK(m.elements()[1].dom.lo == doctest::Approx(0.375));
  CHECK(m.elements()[1].dom.hi == doctest::Approx(0.5));
  CHECK_FALSE(m.elements()[1].full);
  CHECK(m.elements()[2].dom.lo == doctest::Approx(0.5));
  CHECK(m.elements()[2].full);
  CHECK(m.full_count() == 1);
  // Two consecutive non-full elements before the full one.
  CHECK(m.longest_partial_run() == 2);
  CHECK(m.has_protected_full_branch());
  CHECK(total_length(m.survivor()) == doctest::Approx(7.0 / 8.0));
}

TEST_CASE("branch domains must tile the base interval") {
  std::vector<Branch> gap;
  gap.emplace_back(Interval{0.0, 0.4}, AffineBranch{2.5, 0.0});
  gap.emplace_back(Interval{0.5, 1.0}, AffineBranch{2.0, -1.0});
  CHECK_THROWS_AS(OpenMap(kUnit, std::move(gap), {}), Error);

  std::vector<Branch> overlap;
  overlap.emplace_back(Interval{0.0, 0.6}, AffineBranch{5.0 / 3.0, 0.0});
  overlap.emplace_back(Interval{0.5, 1.0}, AffineBranch{2.0, -1.0});
  CHECK_THROWS_AS(OpenMap(kUnit, std::move(overlap), {}), Error);
}

TEST_CASE("two-step survivor partition matches the hand enumeration") {
  // Doubling with hole (1/4, 3/8).  The six surviving two-step elements are
  //   [0,1/8], [3/16,1/4], [3/8,1/2], [1/2,5/8], [11/16,3/4], [3/4,1]
  // and only the last one is full.
  const MapFamily fam = doubling_family({Interval{0.25, 0.375}});
  const std::vector<int> word{0, 0};
  const auto elems = survivor_partition(fam, word);
  REQUIRE(elems.size() == 6);
  const double doms[6][2] = {{0.0, 0.125},    {0.1875, 0.25}, {0.375, 0.5},
                             {0.5, 0.625},    {0.6875, 0.75}, {0.75, 1.0}};
  double total = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(elems[i].dom.lo == doctest::Approx(doms[i][0]).epsilon(1e-13));
    CHECK(elems[i].dom.hi == doctest::Approx(doms[i][1]).epsilon(1e-13));
    CHECK(elems[i].full == (i == 5));
    total += elems[i].dom.length();
  }
  CHECK(total == doctest::Approx(0.75).epsilon(1e-13));

  const SurvivorStats stats = survivor_stats(fam, word);
  CHECK(stats.element_count == 6);
  CHECK(stats.full_count == 1);
  CHECK(stats.longest_partial_run == 5);
}

TEST_CASE("streaming walker agrees with the materialized partition") {
  const MapFamily fam = doubling_family({Interval{0.25, 0.375}});
  const std::vector<int> word{0, 0, 0, 0};
  const auto elems = survivor_partition(fam, word);
  const SurvivorStats stats = survivor_stats(fam, word);
  CHECK(elems.size() == stats.element_count);
  std::size_t fulls = 0;
  for (const auto& e : elems)
    if (e.full) ++fulls;
  CHECK(fulls == static_cast<std::size_t>(stats.full_count));
  // Full elements map onto the whole base.
  for (const auto& e : elems)
    if (e.full) {
      CHECK(e.image.lo == doctest::Approx(0.0));
      CHECK(e.image.hi == doctest::Approx(1.0));
    }
}

TEST_CASE("family validation rejects mismatched bases") {
  std::vector<OpenMap> maps;
  maps.push_back(make_doubling());
  MapFamily fam{Interval{0.0, 2.0}, std::move(maps)};
  CHECK_THROWS_AS(validate_family(fam), Error);
}
