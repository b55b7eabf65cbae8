#ifndef TORKOS_H
#define TORKOS_H

/* C surface of the torkos library: build fans from JSON or by name, run
 * named verification suites, and read back deterministic JSON reports.
 * Handles are opaque; every fallible call returns a status code and leaves
 * a message for tk_last_error on failure. */

#ifdef __cplusplus
extern "C" {
#endif

typedef struct tk_fan tk_fan;
typedef struct tk_report tk_report;

/* 0 means success; positive values mirror the library's error kinds. */
typedef int tk_status;

enum {
  TK_OK = 0,
  TK_ERR_PARSE = 1,
  TK_ERR_NON_PRIMITIVE_RAY = 2,
  TK_ERR_NON_SMOOTH_CONE = 3,
  TK_ERR_NOT_A_FAN = 4,
  TK_ERR_RANK_MISMATCH = 5,
  TK_ERR_LENGTH_MISMATCH = 6,
  TK_ERR_NOT_A_FACET = 7,
  TK_ERR_NO_CONTAINING_CONE = 8,
  TK_ERR_CONE_MISMATCH = 9,
  TK_ERR_FLAVOR_MISMATCH = 10,
  TK_ERR_INVALID_MORPHISM = 11,
  TK_ERR_NOT_LOCALLY_CLOSED = 12,
  TK_ERR_RESOLUTION_TOO_LONG = 13,
  TK_ERR_SIGN_INCOHERENCE = 14,
  TK_ERR_FAN_NOT_COMPLETE = 15,
  TK_ERR_NOT_LOCALLY_FREE = 16,
  TK_ERR_NOT_COHERENT = 17,
  TK_ERR_NOT_TCF = 18,
  TK_ERR_NOT_A_COMPLEX = 19,
  TK_ERR_UNSUPPORTED = 20,
  TK_ERR_INTERNAL = 21
};

const char* tk_version(void);
const char* tk_status_name(tk_status s);

/* Message of the most recent failing call on the calling thread. */
const char* tk_last_error(void);

/* Space-separated list of the built-in fan names. */
const char* tk_builtin_names(void);
/* Space-separated list of the suite names accepted by tk_run_suite. */
const char* tk_suite_names(void);

/* Fan file format: {"rank": n, "rays": [[...],...], "max_cones": [[...],...],
 * "orientation": optional}. */
tk_status tk_fan_from_json(const char* json_text, tk_fan** out);
tk_status tk_fan_builtin(const char* name, tk_fan** out);
void tk_fan_free(tk_fan* fan);
int tk_fan_rank(const tk_fan* fan);
int tk_fan_num_rays(const tk_fan* fan);
int tk_fan_num_cones(const tk_fan* fan);
int tk_fan_is_complete(const tk_fan* fan);

/* Runs one verification suite.
 *   sheaf_json:   optional sheaf or line-bundle description (NULL for the
 *                 suite's default input).
 *   options_json: optional {"window_lo": int, "window_hi": int,
 *                 "chambers": bool, "jobs": int}; NULL for defaults.
 * Check failures still produce a report (query tk_report_passed); the
 * status is nonzero only for malformed inputs or inapplicable suites. */
tk_status tk_run_suite(const tk_fan* fan, const char* suite, const char* sheaf_json,
                       const char* options_json, tk_report** out);
void tk_report_free(tk_report* report);
/* The serialized report; owned by the report handle. */
const char* tk_report_json(const tk_report* report);
int tk_report_passed(const tk_report* report);

#ifdef __cplusplus
}
#endif

#endif /* TORKOS_H */
