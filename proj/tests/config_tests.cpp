#include <doctest.h>

#include <cmath>
#include <string>

#include <json.hpp>

#include "rpf/config.hpp"

using namespace rpf;
using nlohmann::json;

namespace {

json minimal_doc() {
  return json::parse(R"({
    "schema_version": 1,
    "ensemble": {
      "base": [0.0, 1.0],
      "maps": [
        {
          "branches": [
            {"family": "affine", "domain": [0.0, 0.5], "a": 2.0, "b": 0.0},
            {"family": "affine", "domain": [0.5, 1.0], "a": 2.0, "b": -1.0}
          ],
          "hole": []
        }
      ]
    },
    "potential": {"kind": "constant", "log_g": [0.0]},
    "driver": {"kind": "iid", "probs": [1.0]},
    "run": {"n": 10, "depth": 20, "base_points": 4, "fiber": 0, "seed": 9}
  })");
}

int error_code_of(const std::string& text) {
  try {
    (void)load_config(text);
  } catch (const Error& e) {
    return static_cast<int>(e.code());
  }
  return -1;
}

}  // namespace

TEST_CASE("a minimal document loads with defaults applied") {
  const LoadedConfig cfg = load_config(minimal_doc().dump());
  CHECK(cfg.system.family.maps.size() == 1);
  CHECK(cfg.system.driver.symbol_count() == 1);
  CHECK(cfg.system.resolution == 4096);
  CHECK(cfg.ulam_cells == 4096);
  CHECK(cfg.run.n == 10);
  CHECK(cfg.run.depth == 20);
  CHECK(cfg.run.seed == 9);
  CHECK(cfg.escape.epsilons.empty());

  // The echo is a normalized document that parses and round-trips.
  const json echo = json::parse(cfg.echo);
  CHECK(echo["run"]["n"] == 10);
  CHECK(echo["run"]["seed"] == 9);
  CHECK(echo["resolution"]["nodes"] == 4096);
  const LoadedConfig again = load_config(cfg.echo);
  CHECK(again.run.seed == cfg.run.seed);
  CHECK(again.system.resolution == cfg.system.resolution);
}

TEST_CASE("every built-in ensemble loads") {
  REQUIRE(builtin_count() == 4);
  for (int i = 0; i < builtin_count(); ++i) {
    const char* name = builtin_name(i);
    REQUIRE(name != nullptr);
    const char* text = builtin_config(name);
    REQUIRE(text != nullptr);
    const LoadedConfig cfg = load_config(text);
    CHECK(cfg.system.family.maps.size() >= 1);
  }
  CHECK(builtin_config("no-such-ensemble") == nullptr);
  CHECK(builtin_name(99) == nullptr);
}

TEST_CASE("schema violations carry the schema error code") {
  auto doc = minimal_doc();
  doc["schema_version"] = 2;
  CHECK(error_code_of(doc.dump()) == static_cast<int>(ErrorCode::Schema));

  doc = minimal_doc();
  doc.erase("ensemble");
  CHECK(error_code_of(doc.dump()) == static_cast<int>(ErrorCode::Schema));

  doc = minimal_doc();
  doc["ensemble"]["maps"][0]["branches"][0]["family"] = "cubic";
  CHECK(error_code_of(doc.dump()) == static_cast<int>(ErrorCode::Schema));

  doc = minimal_doc();
  doc["driver"]["kind"] = "quantum";
  CHECK(error_code_of(doc.dump()) == static_cast<int>(ErrorCode::Schema));

  doc = minimal_doc();
  doc["run"]["n"] = 0;
  CHECK(error_code_of(doc.dump()) == static_cast<int>(ErrorCode::Schema));

  doc = minimal_doc();
  doc["potential"]["kind"] = "constant";
  doc["potential"]["log_g"] = {0.0, 0.0, 0.0};
  CHECK(error_code_of(doc.dump()) == static_cast<int>(ErrorCode::Schema));

  CHECK(error_code_of("{ not json") == static_cast<int>(ErrorCode::Schema));
}

TEST_CASE("branch domains must cover the base or loading fails") {
  auto doc = minimal_doc();
  doc["ensemble"]["maps"][0]["branches"][0]["domain"] = {0.0, 0.4};
  CHECK(error_code_of(doc.dump()) == static_cast<int>(ErrorCode::Schema));
}

TEST_CASE("iid weights must sum to one") {
  auto doc = minimal_doc();
  doc["driver"]["probs"] = {0.5, 0.2};
  CHECK(error_code_of(doc.dump()) == static_cast<int>(ErrorCode::Schema));
}

TEST_CASE("markov driver with computed stationary distribution") {
  auto doc = minimal_doc();
  doc["ensemble"]["maps"].push_back(doc["ensemble"]["maps"][0]);
  doc["potential"]["log_g"] = {0.0, 0.0};
  doc["driver"] = json::parse(
      R"({"kind": "markov", "transition": [[0.7, 0.3], [0.4, 0.6]]})");
  const LoadedConfig cfg = load_config(doc.dump());
  CHECK(cfg.system.driver.symbol_count() == 2);
  // Frequencies should follow the stationary vector (4/7, 3/7).
  int zeros = 0;
  const int n = 2000;
  for (int k = 0; k < n; ++k)
    zeros += cfg.system.driver.symbol_at(k) == 0 ? 1 : 0;
  CHECK(static_cast<double>(zeros) / n ==
        doctest::Approx(4.0 / 7.0).epsilon(0.08));
}

TEST_CASE("rotation driver parses and is deterministic") {
  auto doc = minimal_doc();
  doc["ensemble"]["maps"].push_back(doc["ensemble"]["maps"][0]);
  doc["potential"]["log_g"] = {0.0, 0.0};
  doc["driver"] = json::parse(R"({
    "kind": "rotation", "alpha": 0.6180339887498949, "omega0": 0.0,
    "cells": [{"range": [0.0, 0.5], "symbol": 0},
              {"range": [0.5, 1.0], "symbol": 1}]
  })");
  const LoadedConfig cfg = load_config(doc.dump());
  CHECK(cfg.system.driver.deterministic());

  // Cells must partition the circle.
  doc["driver"]["cells"][1]["range"] = {0.6, 1.0};
  CHECK(error_code_of(doc.dump()) == static_cast<int>(ErrorCode::Schema));
}

TEST_CASE("escape grids parse into a validated hole family") {
  auto doc = minimal_doc();
  doc["escape"] = json::parse(R"({
    "grid": [
      {"epsilon": 0.0, "holes": [[]]},
      {"epsilon": 0.125, "holes": [[[0.25, 0.375]]]}
    ]
  })");
  const LoadedConfig cfg = load_config(doc.dump());
  REQUIRE(cfg.escape.epsilons.size() == 2);
  CHECK(cfg.escape.epsilons[0] == 0.0);
  CHECK(cfg.escape.holes[1][0].size() == 1);

  // First grid entry must be the closed system.
  doc["escape"]["grid"][0]["epsilon"] = 0.01;
  CHECK(error_code_of(doc.dump()) == static_cast<int>(ErrorCode::Schema));
}

TEST_CASE("geometric and piecewise log weights parse") {
  auto doc = minimal_doc();
  doc["potential"] = json::parse(R"({"kind": "geometric", "t": 0.5})");
  CHECK_NOTHROW((void)load_config(doc.dump()));

  doc["potential"] = json::parse(R"({
    "kind": "piecewise_log",
    "log_g": [
      {"breaks": [0.0, 0.5, 1.0],
       "slopes": [0.0, 0.2],
       "intercepts": [-0.1, -0.3]}
    ]
  })");
  CHECK_NOTHROW((void)load_config(doc.dump()));

  // Breaks must span the base interval.
  doc["potential"]["log_g"][0]["breaks"] = {0.0, 0.5, 0.9};
  CHECK(error_code_of(doc.dump()) == static_cast<int>(ErrorCode::Schema));
}
