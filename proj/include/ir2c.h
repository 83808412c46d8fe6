/*
 * C interface to the ir2c library: translate a functional IR to C, check it,
 * validate the translation by differential execution, and run functions under
 * the defensive interpreter.
 *
 * All calls go through an opaque session. Strings returned by the library
 * stay valid until the next call on the same session (or its destruction).
 */
#ifndef IR2C_H
#define IR2C_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ir2c_session ir2c_session;

typedef enum ir2c_status {
    IR2C_OK = 0,
    IR2C_ERR_PARSE = 1,        /* IR text is not well-formed */
    IR2C_ERR_CHECK = 2,        /* representation rules violated */
    IR2C_ERR_TRANSLATE = 3,    /* no C image for this program */
    IR2C_ERR_IO = 4,           /* file could not be read */
    IR2C_ERR_CONFIG = 5,       /* bad configuration key or value */
    IR2C_ERR_ARGS = 6,         /* bad run arguments */
    IR2C_ERR_STATE = 7,        /* call sequence error: no program loaded */
    IR2C_ERR_DIVERGENCE = 8,   /* validation found a divergence */
    IR2C_ERR_INCONCLUSIVE = 9, /* validation hit fuel or step caps */
} ir2c_status;

ir2c_session* ir2c_session_new(void);
void ir2c_session_free(ir2c_session* s);

/* Explanation of the most recent failure on this session. */
const char* ir2c_error(const ir2c_session* s);

/* Configuration keys: bits_char, bits_short, bits_int, bits_long,
 * bits_llong, tests, seed, fuel_cap, step_cap, max_array_len, indent.
 * Values are decimal integers. A config file holds `key = value` lines. */
ir2c_status ir2c_config_set(ir2c_session* s, const char* key,
                            const char* value);
ir2c_status ir2c_config_load_file(ir2c_session* s, const char* path);

/* Parses, checks, and translates a program; replaces any prior program. */
ir2c_status ir2c_load_string(ir2c_session* s, const char* text);
ir2c_status ir2c_load_file(ir2c_session* s, const char* path);

/* The pretty-printed translation unit (requires a loaded program). */
const char* ir2c_c_source(ir2c_session* s);

/* Per-function fuel bounds as a text table (requires a loaded program). */
const char* ir2c_fuel_table(ir2c_session* s);

/* Differential validation. *report_json receives the JSON report; *exit_code
 * receives 0 (agreement), 3 (divergence), or 4 (inconclusive). Returns
 * IR2C_OK when the run completed, regardless of its verdict. */
ir2c_status ir2c_validate(ir2c_session* s, const char** report_json,
                          int* exit_code);

/* Runs one function on typed arguments (e.g. "int:3", "uchar[]:1,2,3") and
 * returns the printed outcome. */
ir2c_status ir2c_run(ir2c_session* s, const char* fn, const char* const* args,
                     size_t nargs, const char** output);

#ifdef __cplusplus
}
#endif

#endif /* IR2C_H */
