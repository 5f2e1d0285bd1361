#include "rpf/capi.h"

#include <json.hpp>

#include <cerrno>
#include <cstdlib>
#include <exception>
#include <string>

#include "rpf/common.hpp"
#include "rpf/config.hpp"
#include "rpf/runner.hpp"

namespace {

std::string g_create_error;  // messages from failed session creation

int code_of(const std::exception& e) {
  if (const auto* err = dynamic_cast<const rpf::Error*>(&e))
    return static_cast<int>(err->code());
  return RPF_ERR_NUMERIC;
}

}  // namespace

struct rpf_session {
  nlohmann::json doc;        // config document, option overrides applied
  rpf::RunResult result;
  std::string echo;          // normalized document of the last run
  std::string last_error;
  bool has_result = false;
};

extern "C" {

int rpf_session_from_json(const char* json_text, rpf_session** out) {
  if (out == nullptr) return RPF_ERR_SCHEMA;
  *out = nullptr;
  if (json_text == nullptr) {
    g_create_error = "config text is null";
    return RPF_ERR_SCHEMA;
  }
  try {
    // full parse-and-validate up front so creation fails loudly
    rpf::load_config(json_text);
    auto* s = new rpf_session;
    s->doc = nlohmann::json::parse(json_text);
    *out = s;
    return RPF_OK;
  } catch (const std::exception& e) {
    g_create_error = e.what();
    return code_of(e);
  }
}

int rpf_session_from_builtin(const char* name, rpf_session** out) {
  if (out == nullptr) return RPF_ERR_SCHEMA;
  *out = nullptr;
  const char* config =
      name == nullptr ? nullptr : rpf::builtin_config(name);
  if (config == nullptr) {
    g_create_error = std::string("unknown built-in ensemble '") +
                     (name == nullptr ? "" : name) + "'";
    return RPF_ERR_SCHEMA;
  }
  return rpf_session_from_json(config, out);
}

void rpf_session_destroy(rpf_session* session) { delete session; }

int rpf_set_option(rpf_session* session, const char* key, const char* value) {
  if (session == nullptr) return RPF_ERR_SCHEMA;
  if (key == nullptr || value == nullptr) {
    session->last_error = "option key/value is null";
    return RPF_ERR_SCHEMA;
  }
  const std::string k = key;
  const std::string v = value;
  try {
    errno = 0;
    char* end = nullptr;
    if (k == "t") {
      const double t = std::strtod(v.c_str(), &end);
      if (end == v.c_str() || *end != '\0' || errno != 0)
        rpf::fail_schema("option t: '" + v + "' is not a number");
      session->doc["potential"]["t"] = t;
      return RPF_OK;
    }
    const long long n = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0' || errno != 0)
      rpf::fail_schema("option " + k + ": '" + v + "' is not an integer");
    if (k == "seed")
      session->doc["run"]["seed"] = static_cast<std::uint64_t>(n);
    else if (k == "n")
      session->doc["run"]["n"] = static_cast<int>(n);
    else if (k == "depth")
      session->doc["run"]["depth"] = static_cast<int>(n);
    else if (k == "base-points" || k == "base_points")
      session->doc["run"]["base_points"] = static_cast<int>(n);
    else if (k == "fiber")
      session->doc["run"]["fiber"] = n;
    else if (k == "grid" || k == "nodes")
      session->doc["resolution"]["nodes"] = static_cast<int>(n);
    else if (k == "nu-cells" || k == "nu_cells")
      session->doc["resolution"]["nu_cells"] = static_cast<int>(n);
    else if (k == "ulam-cells" || k == "ulam_cells")
      session->doc["resolution"]["ulam_cells"] = static_cast<int>(n);
    else
      rpf::fail_schema("unknown option '" + k + "'");
    return RPF_OK;
  } catch (const std::exception& e) {
    session->last_error = e.what();
    return code_of(e);
  }
}

int rpf_run(rpf_session* session, const char* command) {
  if (session == nullptr) return RPF_ERR_SCHEMA;
  if (command == nullptr) {
    session->last_error = "command is null";
    return RPF_ERR_SCHEMA;
  }
  try {
    const rpf::LoadedConfig cfg = rpf::load_config(session->doc.dump());
    session->result = rpf::run_command(cfg, command);
    session->echo = cfg.echo;
    session->has_result = true;
    return RPF_OK;
  } catch (const std::exception& e) {
    session->last_error = e.what();
    return code_of(e);
  }
}

int rpf_table_count(const rpf_session* session) {
  if (session == nullptr || !session->has_result) return 0;
  return static_cast<int>(session->result.tables.size());
}

const char* rpf_table_name(const rpf_session* session, int table) {
  if (table < 0 || table >= rpf_table_count(session)) return nullptr;
  return session->result.tables[static_cast<std::size_t>(table)].name.c_str();
}

int rpf_table_columns(const rpf_session* session, int table) {
  if (table < 0 || table >= rpf_table_count(session)) return 0;
  return static_cast<int>(
      session->result.tables[static_cast<std::size_t>(table)].columns.size());
}

int rpf_table_rows(const rpf_session* session, int table) {
  if (table < 0 || table >= rpf_table_count(session)) return 0;
  return static_cast<int>(
      session->result.tables[static_cast<std::size_t>(table)].rows.size());
}

const char* rpf_column_name(const rpf_session* session, int table,
                            int column) {
  if (column < 0 || column >= rpf_table_columns(session, table))
    return nullptr;
  return session->result.tables[static_cast<std::size_t>(table)]
      .columns[static_cast<std::size_t>(column)]
      .c_str();
}

const char* rpf_cell(const rpf_session* session, int table, int row,
                     int column) {
  if (row < 0 || row >= rpf_table_rows(session, table)) return nullptr;
  if (column < 0 || column >= rpf_table_columns(session, table))
    return nullptr;
  return session->result.tables[static_cast<std::size_t>(table)]
      .rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(column)]
      .c_str();
}

const char* rpf_summary_json(const rpf_session* session) {
  if (session == nullptr || !session->has_result) return nullptr;
  return session->result.summary_json.c_str();
}

const char* rpf_config_echo(const rpf_session* session) {
  if (session == nullptr || !session->has_result) return nullptr;
  return session->echo.c_str();
}

const char* rpf_last_error(const rpf_session* session) {
  return session == nullptr ? g_create_error.c_str()
                            : session->last_error.c_str();
}

int rpf_builtin_count(void) { return rpf::builtin_count(); }

const char* rpf_builtin_name(int index) { return rpf::builtin_name(index); }

const char* rpf_builtin_config(const char* name) {
  return name == nullptr ? nullptr : rpf::builtin_config(name);
}

const char* rpf_version(void) { return "0.1.0"; }

}  // extern "C"
