#include "rpf/config.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

#include "rpf/common.hpp"

namespace rpf {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  fail_schema("config field '" + path + "': " + what);
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

const json& field(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) bad(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) bad(join(path, key), "missing");
  return *it;
}

std::string str_field(const json& j, const std::string& path, const char* key) {
  const auto& v = field(j, path, key);
  if (!v.is_string()) bad(join(path, key), "expected a string");
  return v.get<std::string>();
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

double num_field(const json& j, const std::string& path, const char* key) {
  return num(field(j, path, key), join(path, key));
}

int int_field(const json& j, const std::string& path, const char* key,
              int fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) bad(join(path, key), "expected an integer");
  return it->get<int>();
}

Interval interval_of(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2)
    bad(path, "expected an interval [lo, hi]");
  const Interval out{num(j[0], path + "[0]"), num(j[1], path + "[1]")};
  if (!(out.lo < out.hi)) bad(path, "interval endpoints must be increasing");
  return out;
}

std::vector<double> num_array(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(num(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Branch branch_of(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected a branch object");
  const std::string tag = str_field(j, path, "family");
  const Interval dom = interval_of(field(j, path, "domain"), path + ".domain");
  if (tag == "affine") {
    return Branch(dom, AffineBranch{num_field(j, path, "a"),
                                    num_field(j, path, "b")});
  }
  if (tag == "power") {
    return Branch(dom, PowerBranch{num_field(j, path, "c"),
                                   num_field(j, path, "x0"),
                                   num_field(j, path, "p")});
  }
  if (tag == "quadratic") {
    return Branch(dom, QuadraticBranch{num_field(j, path, "alpha"),
                                       num_field(j, path, "r0"),
                                       num_field(j, path, "r1")});
  }
  if (tag == "mp") {
    return Branch(dom, MannevillePomeauBranch{num_field(j, path, "gamma")});
  }
  bad(path + ".family", "unknown branch family '" + tag +
                            "' (expected affine|power|quadratic|mp)");
}

IntervalSet holes_of(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of intervals");
  IntervalSet out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(interval_of(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

MapFamily family_of(const json& j, const std::string& path) {
  MapFamily fam;
  fam.base = interval_of(field(j, path, "base"), path + ".base");
  const auto& maps = field(j, path, "maps");
  if (!maps.is_array() || maps.empty())
    bad(path + ".maps", "expected a non-empty array of maps");
  for (std::size_t s = 0; s < maps.size(); ++s) {
    const std::string mpath = path + ".maps[" + std::to_string(s) + "]";
    const auto& m = maps[s];
    const auto& branches = field(m, mpath, "branches");
    if (!branches.is_array() || branches.empty())
      bad(mpath + ".branches", "expected a non-empty array");
    std::vector<Branch> brs;
    for (std::size_t b = 0; b < branches.size(); ++b)
      brs.push_back(branch_of(branches[b],
                              mpath + ".branches[" + std::to_string(b) + "]"));
    IntervalSet hole;
    if (m.contains("hole")) hole = holes_of(m["hole"], mpath + ".hole");
    fam.maps.emplace_back(fam.base, std::move(brs), std::move(hole));
  }
  return fam;
}

Potential potential_of(const json& j, const std::string& path,
                       const Interval& base) {
  if (!j.is_object()) bad(path, "expected a potential object");
  const std::string tag = str_field(j, path, "kind");
  if (tag == "constant") {
    ConstantPotential p;
    p.log_g = num_array(field(j, path, "log_g"), path + ".log_g");
    if (p.log_g.empty()) bad(path + ".log_g", "must not be empty");
    return p;
  }
  if (tag == "geometric") {
    return GeometricPotential{num_field(j, path, "t")};
  }
  if (tag == "piecewise_log") {
    const auto& per = field(j, path, "log_g");
    if (!per.is_array() || per.empty())
      bad(path + ".log_g", "expected one piecewise function per symbol");
    PiecewiseLogPotential p;
    for (std::size_t s = 0; s < per.size(); ++s) {
      const std::string spath = path + ".log_g[" + std::to_string(s) + "]";
      const auto& fn = per[s];
      const auto breaks = num_array(field(fn, spath, "breaks"), spath);
      const auto slopes = num_array(field(fn, spath, "slopes"), spath);
      const auto intercepts =
          num_array(field(fn, spath, "intercepts"), spath);
      if (breaks.size() < 2 || slopes.size() + 1 != breaks.size() ||
          intercepts.size() != slopes.size())
        bad(spath, "breaks must have one more entry than slopes/intercepts");
      if (std::abs(breaks.front() - base.lo) > kBreakDedupRel * base.length() ||
          std::abs(breaks.back() - base.hi) > kBreakDedupRel * base.length())
        bad(spath + ".breaks", "must span the base interval");
      std::vector<Piece> pieces;
      for (std::size_t i = 0; i < slopes.size(); ++i)
        pieces.push_back(AffinePiece{slopes[i], intercepts[i]});
      p.log_g.emplace_back(base, breaks, std::move(pieces));
    }
    return p;
  }
  bad(path + ".kind", "unknown potential kind '" + tag +
                          "' (expected constant|geometric|piecewise_log)");
}

DriverSpec driver_of(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected a driver object");
  const std::string tag = str_field(j, path, "kind");
  if (tag == "iid") {
    IidDriver d;
    d.probs = num_array(field(j, path, "probs"), path + ".probs");
    return d;
  }
  if (tag == "markov") {
    MarkovDriver d;
    const auto& rows = field(j, path, "transition");
    if (!rows.is_array() || rows.empty())
      bad(path + ".transition", "expected a non-empty matrix");
    for (std::size_t r = 0; r < rows.size(); ++r)
      d.transition.push_back(
          num_array(rows[r], path + ".transition[" + std::to_string(r) + "]"));
    if (j.contains("stationary")) {
      d.stationary = num_array(j["stationary"], path + ".stationary");
    } else {
      // power-iterate the transition to a fixed point
      const std::size_t m = d.transition.size();
      std::vector<double> pi(m, 1.0 / static_cast<double>(m));
      for (int it = 0; it < 20000; ++it) {
        std::vector<double> next(m, 0.0);
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = 0; b < m; ++b)
            next[b] += pi[a] * d.transition[a][b];
        double gap = 0.0;
        for (std::size_t a = 0; a < m; ++a)
          gap = std::max(gap, std::abs(next[a] - pi[a]));
        pi = std::move(next);
        if (gap < 1e-15) break;
      }
      d.stationary = std::move(pi);
    }
    return d;
  }
  if (tag == "rotation") {
    RotationDriver d;
    d.alpha = num_field(j, path, "alpha");
    if (j.contains("omega0")) d.omega0 = num_field(j, path, "omega0");
    const auto& cells = field(j, path, "cells");
    if (!cells.is_array() || cells.empty())
      bad(path + ".cells", "expected a non-empty array");
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string cpath = path + ".cells[" + std::to_string(c) + "]";
      const auto& cell = cells[c];
      const Interval r =
          interval_of(field(cell, cpath, "range"), cpath + ".range");
      const auto& sym = field(cell, cpath, "symbol");
      if (!sym.is_number_integer()) bad(cpath + ".symbol", "expected integer");
      d.cells.push_back({r.lo, r.hi, sym.get<int>()});
    }
    return d;
  }
  bad(path + ".kind",
      "unknown driver kind '" + tag + "' (expected iid|markov|rotation)");
}

HoleFamily escape_of(const json& j, const std::string& path,
                     std::size_t symbols) {
  HoleFamily fam;
  const auto& grid = field(j, path, "grid");
  if (!grid.is_array() || grid.size() < 2)
    bad(path + ".grid", "expected at least two grid points");
  for (std::size_t e = 0; e < grid.size(); ++e) {
    const std::string epath = path + ".grid[" + std::to_string(e) + "]";
    const auto& entry = grid[e];
    fam.epsilons.push_back(num_field(entry, epath, "epsilon"));
    std::vector<IntervalSet> per_symbol;
    const auto& holes = field(entry, epath, "holes");
    if (!holes.is_array()) bad(epath + ".holes", "expected an array");
    if (!holes.empty() && holes.size() != symbols)
      bad(epath + ".holes", "expected one hole set per symbol");
    for (std::size_t s = 0; s < holes.size(); ++s)
      per_symbol.push_back(
          holes_of(holes[s], epath + ".holes[" + std::to_string(s) + "]"));
    fam.holes.push_back(std::move(per_symbol));
  }
  return fam;
}

}  // namespace

LoadedConfig load_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail_schema(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail_schema("config root must be an object");
  const auto ver = field(doc, "", "schema_version");
  if (!ver.is_number_integer() || ver.get<int>() != 1)
    fail_schema("config field 'schema_version': expected 1");

  MapFamily family = family_of(field(doc, "", "ensemble"), "ensemble");
  Potential potential =
      potential_of(field(doc, "", "potential"), "potential", family.base);

  RunParams run;
  if (doc.contains("run")) {
    const auto& r = doc["run"];
    if (r.contains("seed")) {
      if (!r["seed"].is_number_unsigned() && !r["seed"].is_number_integer())
        bad("run.seed", "expected a non-negative integer");
      run.seed = r["seed"].get<std::uint64_t>();
    }
    run.n = int_field(r, "run", "n", run.n);
    run.depth = int_field(r, "run", "depth", run.depth);
    run.base_points = int_field(r, "run", "base_points", run.base_points);
    run.fiber = int_field(r, "run", "fiber", 0);
  }
  if (run.n < 1) bad("run.n", "must be at least 1");
  if (run.depth < 1) bad("run.depth", "must be at least 1");
  if (run.base_points < 1) bad("run.base_points", "must be at least 1");

  const auto& drv = field(doc, "", "driver");
  System sys{std::move(family), std::move(potential),
             Driver(driver_of(drv, "driver"), run.seed)};

  int ulam_cells = 4096;
  if (doc.contains("resolution")) {
    const auto& res = doc["resolution"];
    sys.resolution = int_field(res, "resolution", "nodes", sys.resolution);
    sys.nu_cells = int_field(res, "resolution", "nu_cells", sys.nu_cells);
    ulam_cells = int_field(res, "resolution", "ulam_cells", ulam_cells);
  }

  validate_system(sys);

  HoleFamily escape;
  if (doc.contains("escape")) {
    escape = escape_of(doc["escape"], "escape", sys.family.maps.size());
    validate_hole_family(escape, sys);
  }

  // normalized echo: effective run/resolution values made explicit
  json echo = doc;
  echo["run"] = {{"n", run.n},
                 {"depth", run.depth},
                 {"base_points", run.base_points},
                 {"fiber", run.fiber},
                 {"seed", run.seed}};
  echo["resolution"] = {{"nodes", sys.resolution},
                        {"nu_cells", sys.nu_cells},
                        {"ulam_cells", ulam_cells}};
  return LoadedConfig{std::move(sys), ulam_cells, std::move(escape), run,
                      echo.dump(2)};
}

}  // namespace rpf
