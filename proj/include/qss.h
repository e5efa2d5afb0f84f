#ifndef QSS_H
#define QSS_H

/* C interface to the constrained-minimization core.  All functionality the
 * command-line tool needs is reachable through this header; the C++ classes
 * behind it are not exported.
 *
 * Conventions:
 *   - Every fallible call returns a qss_status; QSS_OK is 0.
 *   - On failure, qss_last_error() returns a thread-local message that stays
 *     valid until the next API call on the same thread.
 *   - Strings returned through char** out-parameters are heap-allocated and
 *     must be released with qss_string_free().
 *   - Pairs reference their context's grid: destroy pairs before the context
 *     that created them.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qss_status {
    QSS_OK = 0,
    QSS_ERR_VALIDATION = 2,   /* bad config, bad arguments, failed hypothesis */
    QSS_ERR_NONCONVERGED = 3, /* solver stopped without meeting its tolerances */
    QSS_ERR_IO = 4,           /* file read/write/parse failure */
    QSS_ERR_INTERNAL = 5      /* unexpected condition; report a bug */
} qss_status;

typedef struct qss_ctx qss_ctx;
typedef struct qss_pair qss_pair;

const char* qss_version(void);
const char* qss_last_error(void);
void qss_string_free(char* s);

/* Context = one validated run configuration (parameters, potential, grid,
 * symmetry order, solver settings), created from a JSON document.  Unknown
 * keys anywhere in the document are rejected. */
qss_status qss_ctx_create(const char* config_json, qss_ctx** out);
/* Canonical resolved configuration (defaults filled in), suitable for
 * embedding in reports and for byte-stable re-runs. */
qss_status qss_ctx_describe(const qss_ctx* ctx, char** resolved_json);
void qss_ctx_destroy(qss_ctx* ctx);

/* Pairs (u, v) of node tables on the context grid, lexicographic order. */
qss_status qss_pair_create(const qss_ctx* ctx, qss_pair** out); /* zeroed */
qss_status qss_pair_clone(const qss_pair* src, qss_pair** out);
void qss_pair_destroy(qss_pair* p);
qss_status qss_pair_nodes(const qss_ctx* ctx, size_t* nodes_per_component);
/* component: 0 = u, 1 = v */
qss_status qss_pair_get(const qss_pair* p, int component, double* buf, size_t len);
qss_status qss_pair_set(qss_pair* p, int component, const double* buf, size_t len);

/* Workflow steps. */
qss_status qss_seed(const qss_ctx* ctx, qss_pair* p);
qss_status qss_symmetrize(const qss_ctx* ctx, qss_pair* p);
qss_status qss_project(const qss_ctx* ctx, qss_pair* p);
qss_status qss_breakdown_json(const qss_ctx* ctx, const qss_pair* p, char** json);

/* Full constrained minimization.  warm may be NULL (seed from config); when
 * the config lists multistart seed widths, all variants run and the best
 * converged run is returned.  On QSS_ERR_NONCONVERGED the report, trace and
 * final pair are still written so the caller can inspect them. */
qss_status qss_solve(const qss_ctx* ctx, const qss_pair* warm, qss_pair** out_pair,
                     char** report_json, char** trace_csv);

/* Diagnostics. */
qss_status qss_fiber_scan(const qss_ctx* ctx, const qss_pair* p, double t_min, double t_max,
                          int samples, char** csv);
qss_status qss_check_potential(const qss_ctx* ctx, char** json);
/* Finite-difference audit of the energy and constraint gradients on `trials`
 * deterministic random smooth pairs. */
qss_status qss_gradcheck(const qss_ctx* ctx, unsigned seed, int trials, char** json);
/* eps <= 0 selects the default threshold 1e-3 * max|f|. */
qss_status qss_nodal(const qss_ctx* ctx, const qss_pair* p, int component, double eps,
                     char** json);
/* Re-verifies a previously written solve report against the dumped pair. */
qss_status qss_diagnose(const qss_ctx* ctx, const char* report_json, const qss_pair* p,
                        char** json);

/* Field dumps: text and raw variants of the same portable format.  Loading
 * accepts dumps at a different resolution (same dimension and box) and
 * resamples them onto the context grid. */
qss_status qss_field_save_text(const qss_pair* p, int component, const char* path);
qss_status qss_field_save_raw(const qss_pair* p, int component, const char* path);
qss_status qss_field_load(qss_pair* p, int component, const char* path);
qss_status qss_pgm_slice(const qss_pair* p, int component, double eps, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* QSS_H */
