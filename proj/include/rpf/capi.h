#ifndef RPF_CAPI_H
#define RPF_CAPI_H

/* C interface to the random-transfer-operator toolkit.  All entry points
 * return a status code (0 = ok, 2 = malformed config, 3 = failed structural
 * assumption, 4 = numeric failure) or a pointer that is NULL on error; no
 * exceptions cross this boundary.  Returned strings stay owned by the
 * session and are valid until the next rpf_run on it or rpf_session_destroy.
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define RPF_OK 0
#define RPF_ERR_SCHEMA 2
#define RPF_ERR_ASSUMPTION 3
#define RPF_ERR_NUMERIC 4

typedef struct rpf_session rpf_session;

/* --- session lifecycle -------------------------------------------------- */

/* Parses a config document.  On failure *out is NULL and the message is
 * available through rpf_last_error(NULL). */
int rpf_session_from_json(const char* json_text, rpf_session** out);
int rpf_session_from_builtin(const char* name, rpf_session** out);
void rpf_session_destroy(rpf_session* session);

/* Overrides one config value before the next run.  Keys: seed, n, depth,
 * base-points, fiber, grid (sample nodes), nu-cells, ulam-cells, t
 * (geometric-potential exponent).  Values are decimal strings. */
int rpf_set_option(rpf_session* session, const char* key, const char* value);

/* Runs one command: certify, density, conformal, invariant, lyapunov,
 * correlations, residual, escape, oracle.  Replaces the session's tables. */
int rpf_run(rpf_session* session, const char* command);

/* --- results ------------------------------------------------------------ */

int rpf_table_count(const rpf_session* session);
const char* rpf_table_name(const rpf_session* session, int table);
int rpf_table_columns(const rpf_session* session, int table);
int rpf_table_rows(const rpf_session* session, int table);
const char* rpf_column_name(const rpf_session* session, int table, int column);
const char* rpf_cell(const rpf_session* session, int table, int row,
                     int column);

/* One JSON object with the headline numbers of the last run. */
const char* rpf_summary_json(const rpf_session* session);

/* Normalized config document of the last run, overrides applied. */
const char* rpf_config_echo(const rpf_session* session);

/* Message of the last failure on this session; pass NULL for failures of
 * session creation. */
const char* rpf_last_error(const rpf_session* session);

/* --- built-in ensembles --------------------------------------------------*/

int rpf_builtin_count(void);
const char* rpf_builtin_name(int index);
/* NULL when the name is unknown. */
const char* rpf_builtin_config(const char* name);

const char* rpf_version(void);

#ifdef __cplusplus
}
#endif

#endif /* RPF_CAPI_H */
