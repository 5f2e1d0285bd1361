#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "rpf/driver.hpp"

using namespace rpf;

TEST_CASE("iid driver is reproducible and seed-sensitive") {
  const Driver a(IidDriver{{0.5, 0.5}}, 42);
  const Driver b(IidDriver{{0.5, 0.5}}, 42);
  const Driver c(IidDriver{{0.5, 0.5}}, 43);
  const auto wa = a.word(-20, 40);
  const auto wb = b.word(-20, 40);
  const auto wc = c.word(-20, 40);
  CHECK(wa == wb);
  CHECK(wa != wc);
  CHECK(a.symbol_count() == 2);
  CHECK_FALSE(a.deterministic());
  CHECK(a.seed() == 42);
}

TEST_CASE("iid word is the concatenation of symbol_at") {
  const Driver d(IidDriver{{0.3, 0.7}}, 7);
  const auto w = d.word(-5, 11);
  REQUIRE(w.size() == 11);
  for (int i = 0; i < 11; ++i) CHECK(w[static_cast<std::size_t>(i)] == d.symbol_at(-5 + i));
}

TEST_CASE("iid frequencies match the weights") {
  const Driver d(IidDriver{{0.3, 0.7}}, 11);
  int ones = 0;
  const int n = 4000;
  for (int k = -n / 2; k < n / 2; ++k) ones += d.symbol_at(k);
  const double freq = static_cast<double>(ones) / n;
  // 3 sigma of a Bernoulli(0.7) mean over 4000 draws is about 0.022.
  CHECK(freq == doctest::Approx(0.7).epsilon(0.05));
}

TEST_CASE("degenerate iid weights give a constant sequence") {
  const Driver d(IidDriver{{1.0, 0.0}}, 3);
  for (int k = -10; k <= 10; ++k) CHECK(d.symbol_at(k) == 0);
}

TEST_CASE("period-two Markov chain alternates on both sides of zero") {
  MarkovDriver spec;
  spec.transition = {{0.0, 1.0}, {1.0, 0.0}};
  spec.stationary = {0.5, 0.5};
  const Driver d(spec, 99);
  for (int k = -8; k < 8; ++k)
    CHECK(d.symbol_at(k) + d.symbol_at(k + 1) == 1);
}

TEST_CASE("Markov chain visits states with stationary frequencies") {
  MarkovDriver spec;
  spec.transition = {{0.7, 0.3}, {0.4, 0.6}};
  spec.stationary = {4.0 / 7.0, 3.0 / 7.0};
  const Driver d(spec, 5);
  int zeros = 0;
  const int n = 3000;
  for (int k = 0; k < n; ++k) zeros += d.symbol_at(k) == 0 ? 1 : 0;
  CHECK(static_cast<double>(zeros) / n ==
        doctest::Approx(4.0 / 7.0).epsilon(0.06));
  // Backward indices are addressable and reproducible too.
  CHECK(d.symbol_at(-100) == d.symbol_at(-100));
}

TEST_CASE("rotation driver reads off the coded circle rotation") {
  const double alpha = 0.5 * (std::sqrt(5.0) - 1.0);
  RotationDriver spec;
  spec.alpha = alpha;
  spec.omega0 = 0.2;
  spec.cells = {{0.0, 0.5, 0}, {0.5, 1.0, 1}};
  const Driver d(spec, 0);
  CHECK(d.deterministic());
  for (int k = -6; k <= 6; ++k) {
    double pos = std::fmod(0.2 + k * alpha, 1.0);
    if (pos < 0.0) pos += 1.0;
    const int expect = pos < 0.5 ? 0 : 1;
    CHECK(d.symbol_at(k) == expect);
  }
}

TEST_CASE("spread base points use the requested spacing") {
  const Driver d(IidDriver{{0.5, 0.5}}, 1);
  const auto pts = d.base_points(4, 10);
  REQUIRE(pts.size() == 4);
  CHECK(pts[0] == 0);
  CHECK(pts[1] == 10);
  CHECK(pts[2] == 20);
  CHECK(pts[3] == 30);
  CHECK(d.policy() == BasePointPolicy::Spread);
}

TEST_CASE("deterministic drivers walk consecutive fibers") {
  RotationDriver spec;
  spec.alpha = 0.37;
  spec.omega0 = 0.0;
  spec.cells = {{0.0, 0.5, 0}, {0.5, 1.0, 1}};
  const Driver d(spec, 0);
  CHECK(d.policy() == BasePointPolicy::Birkhoff);
  const auto pts = d.base_points(5, 100);
  REQUIRE(pts.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(pts[static_cast<std::size_t>(i)] == i);
}
