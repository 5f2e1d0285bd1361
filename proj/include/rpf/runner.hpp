#pragma once

#include <string>
#include <vector>

#include "rpf/config.hpp"

namespace rpf {

// One rectangular result block; cells are preformatted (%.17g for reals) so
// CSV emission and the C API can stay dumb.  Every row carries its
// provenance (iteration count, grid size, sample count) as ordinary columns.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct RunResult {
  std::string command;
  std::vector<Table> tables;
  std::string summary_json;  // single JSON object with the headline numbers
};

// Known commands: certify, density, conformal, invariant, lyapunov,
// correlations, residual, escape, oracle.
const std::vector<std::string>& command_names();

RunResult run_command(const LoadedConfig& cfg, const std::string& command);

}  // namespace rpf
