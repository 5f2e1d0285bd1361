#pragma once

#include <cstdint>
#include <string>

#include "rpf/escape.hpp"
#include "rpf/transfer.hpp"

namespace rpf {

// Run-scale parameters shared by every command; config values can be
// overridden per invocation before the command runs.
struct RunParams {
  int n = 40;             // fold depth / iteration cap
  int depth = 40;         // estimator anchor and tail depth
  int base_points = 16;   // K, Monte-Carlo base points
  std::int64_t fiber = 0; // reference fiber index
  std::uint64_t seed = 1;
};

struct LoadedConfig {
  System system;
  int ulam_cells = 4096;
  HoleFamily escape;     // empty grid when the config has no escape section
  RunParams run;
  std::string echo;      // normalized config document (for the run manifest)
};

// Parse and validate a schema-version-1 config document.  Schema errors
// carry the offending field path.
LoadedConfig load_config(const std::string& json_text);

// Built-in example ensembles (shipped as config documents).
int builtin_count();
const char* builtin_name(int index);
// nullptr when unknown
const char* builtin_config(const std::string& name);

}  // namespace rpf
