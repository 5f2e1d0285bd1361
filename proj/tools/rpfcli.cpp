// Command-line front end.  Talks to the core exclusively through the C API;
// its own work is argument handling, file IO, and CSV/JSON emission.

#include <rpf/capi.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

constexpr const char* kCommands[] = {
    "certify",      "density",  "conformal", "invariant", "lyapunov",
    "correlations", "residual", "escape",    "oracle"};

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (const char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

int fail(int status, const std::string& message) {
  std::cerr << "rpfcli: " << message << "\n";
  return status;
}

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

bool write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

int write_outputs(rpf_session* session, const std::string& command,
                  const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    return fail(RPF_ERR_SCHEMA,
                "cannot create output directory '" + out_dir + "'");
  const std::filesystem::path dir(out_dir);

  for (int t = 0; t < rpf_table_count(session); ++t) {
    std::ostringstream csv;
    const int cols = rpf_table_columns(session, t);
    for (int c = 0; c < cols; ++c)
      csv << (c ? "," : "") << csv_escape(rpf_column_name(session, t, c));
    csv << "\n";
    for (int r = 0; r < rpf_table_rows(session, t); ++r) {
      for (int c = 0; c < cols; ++c)
        csv << (c ? "," : "") << csv_escape(rpf_cell(session, t, r, c));
      csv << "\n";
    }
    const std::string name =
        command + "_" + rpf_table_name(session, t) + ".csv";
    if (!write_file(dir / name, csv.str()))
      return fail(RPF_ERR_SCHEMA, "cannot write " + name);
  }

  const std::string summary = rpf_summary_json(session);
  if (!write_file(dir / (command + "_summary.json"), summary + "\n"))
    return fail(RPF_ERR_SCHEMA, "cannot write the summary");

  // The manifest is the only output with a timestamp; everything else is
  // byte-stable under replay with the same config and seed.
  nlohmann::json manifest;
  manifest["command"] = command;
  manifest["tool_version"] = rpf_version();
  manifest["generated_at"] = iso_timestamp();
  const nlohmann::json echo = nlohmann::json::parse(rpf_config_echo(session));
  manifest["seed"] = echo.at("run").at("seed");
  manifest["config"] = echo;
  if (!write_file(dir / "run_manifest.json", manifest.dump(2) + "\n"))
    return fail(RPF_ERR_SCHEMA, "cannot write the run manifest");

  std::cout << summary << "\n";
  return RPF_OK;
}

struct Flags {
  std::string config;
  std::string out = ".";
  std::string seed, n, depth, base_points, fiber, grid, t;

  void attach(CLI::App* cmd, bool with_config) {
    if (with_config)
      cmd->add_option("--config", config, "config JSON file")
          ->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "output directory (default .)");
    cmd->add_option("--seed", seed, "driver seed");
    cmd->add_option("--n", n, "iteration count / fold depth");
    cmd->add_option("--depth", depth, "estimator anchor and tail depth");
    cmd->add_option("--base-points", base_points, "Monte-Carlo base points");
    cmd->add_option("--fiber", fiber, "reference fiber index");
    cmd->add_option("--grid", grid, "sample nodes per unit length");
    cmd->add_option("--t", t, "geometric-potential exponent");
  }

  std::vector<std::pair<std::string, std::string>> overrides() const {
    std::vector<std::pair<std::string, std::string>> out_list;
    auto push = [&](const char* key, const std::string& value) {
      if (!value.empty()) out_list.emplace_back(key, value);
    };
    push("seed", seed);
    push("n", n);
    push("depth", depth);
    push("base-points", base_points);
    push("fiber", fiber);
    push("grid", grid);
    push("t", t);
    return out_list;
  }
};

int run_with_session(rpf_session* session, const std::string& command,
                     const Flags& flags) {
  for (const auto& [key, value] : flags.overrides()) {
    const int status = rpf_set_option(session, key.c_str(), value.c_str());
    if (status != RPF_OK) return fail(status, rpf_last_error(session));
  }
  const int status = rpf_run(session, command.c_str());
  if (status != RPF_OK) return fail(status, rpf_last_error(session));
  return write_outputs(session, command, flags.out);
}

int run_from_config(const std::string& command, const Flags& flags) {
  if (flags.config.empty())
    return fail(RPF_ERR_SCHEMA,
                "the " + command + " command needs --config FILE (or use "
                "'builtin run')");
  std::ifstream in(flags.config, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  if (!in)
    return fail(RPF_ERR_SCHEMA, "cannot read '" + flags.config + "'");
  rpf_session* session = nullptr;
  const int status = rpf_session_from_json(text.str().c_str(), &session);
  if (status != RPF_OK) return fail(status, rpf_last_error(nullptr));
  const int result = run_with_session(session, command, flags);
  rpf_session_destroy(session);
  return result;
}

int run_from_builtin(const std::string& name, const std::string& command,
                     const Flags& flags) {
  rpf_session* session = nullptr;
  const int status = rpf_session_from_builtin(name.c_str(), &session);
  if (status != RPF_OK) return fail(status, rpf_last_error(nullptr));
  const int result = run_with_session(session, command, flags);
  rpf_session_destroy(session);
  return result;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random open interval map toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rpf_version());

  Flags flags;
  std::vector<std::pair<CLI::App*, std::string>> run_commands;
  for (const char* name : kCommands) {
    CLI::App* sub = app.add_subcommand(name, std::string(name) + " run");
    flags.attach(sub, /*with_config=*/true);
    run_commands.emplace_back(sub, name);
  }

  CLI::App* builtin = app.add_subcommand("builtin", "built-in ensembles");
  builtin->require_subcommand(1);
  CLI::App* blist = builtin->add_subcommand("list", "list built-in ensembles");
  CLI::App* brun =
      builtin->add_subcommand("run", "run a command on a built-in ensemble");
  std::string builtin_name, builtin_command;
  brun->add_option("name", builtin_name, "built-in ensemble name")
      ->required();
  brun->add_option("command", builtin_command, "command to run")->required();
  Flags builtin_flags;
  builtin_flags.attach(brun, /*with_config=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return RPF_ERR_SCHEMA;
  }

  if (blist->parsed()) {
    for (int i = 0; i < rpf_builtin_count(); ++i)
      std::cout << rpf_builtin_name(i) << "\n";
    return RPF_OK;
  }
  if (brun->parsed())
    return run_from_builtin(builtin_name, builtin_command, builtin_flags);
  for (const auto& [sub, name] : run_commands)
    if (sub->parsed()) return run_from_config(name, flags);
  return fail(RPF_ERR_SCHEMA, "no command given");
}
