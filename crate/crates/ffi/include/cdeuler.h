/* C interface of the cdeuler solver: axisymmetric subsonic Euler flows with
 * a contact interface in a cylinder.
 *
 * All functions return a cdeuler_status; on failure the thread-local message
 * from cdeuler_last_error() describes the problem. Handles are opaque and
 * must be released with the matching *_free function exactly once.
 */

#ifndef CDEULER_H
#define CDEULER_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cdeuler_status {
  CDEULER_OK = 0,
  /* invalid or inconsistent configuration */
  CDEULER_ERR_CONFIG = 2,
  /* the coupled iteration failed to converge or left the admissible regime */
  CDEULER_ERR_SOLVER = 3,
  /* file system problem */
  CDEULER_ERR_IO = 4,
  /* null pointer, bad phase index, unknown name, or undersized buffer */
  CDEULER_ERR_INVALID_ARGUMENT = 5,
  /* internal panic (a bug; please report) */
  CDEULER_ERR_PANIC = 6
} cdeuler_status;

/* Phase selector: 0 = plus (outer region, interface to wall),
 *                 1 = minus (inner region, axis to interface). */
#define CDEULER_PHASE_PLUS 0
#define CDEULER_PHASE_MINUS 1

typedef struct cdeuler_config cdeuler_config;
typedef struct cdeuler_solution cdeuler_solution;

/* ---- configuration ----------------------------------------------------- */

/* Parse and validate a TOML configuration document (same format as the CLI).
 * On success *out owns a new handle. */
cdeuler_status cdeuler_config_parse(const char *toml_text, cdeuler_config **out);

void cdeuler_config_free(cdeuler_config *config);

/* Effective configuration with all defaults filled, as a TOML document.
 * Free the returned string with cdeuler_string_free. Returns NULL on error. */
char *cdeuler_config_effective_toml(const cdeuler_config *config);

void cdeuler_string_free(char *s);

/* ---- solving ------------------------------------------------------------ */

/* Run one truncated solve. On success *out owns a new solution handle. */
cdeuler_status cdeuler_solve(const cdeuler_config *config, cdeuler_solution **out);

void cdeuler_solution_free(cdeuler_solution *solution);

/* ---- queries ------------------------------------------------------------ */

/* Number of interface nodes (returns 0 for a null handle). */
size_t cdeuler_solution_interface_len(const cdeuler_solution *solution);

/* Copy the interface curve samples into x[0..len) and f[0..len);
 * len must be at least cdeuler_solution_interface_len(). */
cdeuler_status cdeuler_solution_interface(const cdeuler_solution *solution,
                                          double *x, double *f, size_t len);

/* Cell counts of one phase grid; the node counts are one larger. */
cdeuler_status cdeuler_solution_grid_size(const cdeuler_solution *solution,
                                          int phase, size_t *n_x, size_t *n_s);

/* Copy one node field, x-major with (n_x+1)*(n_s+1) values. Field names:
 * "x", "r", "S", "Lambda", "phi", "psi", "rho", "u_x", "u_r", "u_theta", "p". */
cdeuler_status cdeuler_solution_field(const cdeuler_solution *solution,
                                      int phase, const char *name,
                                      double *out, size_t len);

/* Look up one diagnostics entry by its summary-report key, e.g.
 * "interface_pressure_jump" or "ledger_f". */
cdeuler_status cdeuler_solution_diagnostic(const cdeuler_solution *solution,
                                           const char *key, double *out);

/* Write interface.txt, fields_plus.txt, fields_minus.txt and summary.txt
 * into the given directory (created if missing). */
cdeuler_status cdeuler_solution_write(const cdeuler_solution *solution,
                                      const char *dir);

/* ---- misc ---------------------------------------------------------------- */

/* Message of the last error on the calling thread; the pointer stays valid
 * until the next failing call on the same thread. */
const char *cdeuler_last_error(void);

/* Library version string "x.y.z". */
const char *cdeuler_version(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CDEULER_H */
