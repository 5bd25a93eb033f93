#ifndef STT_H
#define STT_H

/* C interface to the spatiotemporal-tube synthesis library.
 *
 * Conventions:
 *   - every object is an opaque handle created by an stt_*_load/parse/build
 *     call and released by the matching stt_*_free;
 *   - functions returning a pointer yield NULL on failure, functions
 *     returning int yield 0 on success and a nonzero error code otherwise;
 *     stt_last_error()/stt_last_error_code() describe the most recent
 *     failure on the calling thread;
 *   - char* results are heap strings owned by the caller; release them with
 *     stt_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  STT_OK = 0,
  STT_E_IO = 1,
  STT_E_PARSE = 2,
  STT_E_INVALID_TASK = 3,
  STT_E_RESOLUTION_TOO_COARSE = 4,
  STT_E_NET_TOO_LARGE = 5,
  STT_E_NO_FEASIBLE_ASSIGNMENT = 6,
  STT_E_NUMERICAL = 7,
  STT_E_UNKNOWN_PLANT = 8,
  STT_E_DIMENSION_MISMATCH = 9,
  STT_E_ARGUMENT = 10,
  STT_E_FIT_FAILED = 11,
  STT_E_DOMAIN = 12,
  STT_E_INTERNAL = 99
};

enum { STT_SIDE_LOWER = 0, STT_SIDE_UPPER = 1 };
enum { STT_STRATEGY_HEURISTIC = 0, STT_STRATEGY_EXACT = 1 };
enum { STT_LIPSCHITZ_ANALYTIC = 0, STT_LIPSCHITZ_WEIBULL = 1 };

typedef struct stt_task stt_task;
typedef struct stt_net stt_net;
typedef struct stt_tube stt_tube;
typedef struct stt_synthesis stt_synthesis;
typedef struct stt_certificate stt_certificate;
typedef struct stt_trajectory stt_trajectory;

const char* stt_version(void);

int stt_last_error_code(void);
/* borrowed pointer, valid until the next API call on this thread */
const char* stt_last_error(void);
void stt_string_free(char* s);

uint64_t stt_fnv1a64(const void* bytes, size_t n);

/* ------------------------------------------------------------------ tasks */

/* A task file may carry optional "synthesis"/"controller"/"simulation"
 * blocks next to the task itself; the handle keeps them for the run calls
 * below. */
stt_task* stt_task_load(const char* path);
stt_task* stt_task_parse(const char* json_text, const char* name);
void stt_task_free(stt_task* t);

size_t stt_task_dimension(const stt_task* t);
double stt_task_horizon(const stt_task* t);
const char* stt_task_name(const stt_task* t); /* borrowed */
char* stt_task_json(const stt_task* t);
/* the bundle's tool-configuration blocks as one JSON object */
char* stt_task_config_json(const stt_task* t);
/* fnv1a64 of the source bytes the task was parsed from, 16 hex digits */
char* stt_task_source_hash(const stt_task* t);

/* which: "workspace" | "initial" | "target"; writes min(cap, dim) entries,
 * returns the task dimension */
int stt_task_box(const stt_task* t, const char* which, double* lo, double* up,
                 size_t cap);
size_t stt_task_unsafe_count(const stt_task* t);
/* active window of one unsafe piece; end: 0 = start, 1 = stop */
double stt_task_unsafe_window(const stt_task* t, size_t piece, int end);
/* box of one unsafe piece at time tq; returns 1 if active at tq, 0 if not,
 * negative on error */
int stt_task_unsafe_box(const stt_task* t, size_t piece, double tq, double* lo,
                        double* up, size_t cap);

/* ------------------------------------------------------------------- nets */

stt_net* stt_net_build(const stt_task* t, double epsilon);
void stt_net_free(stt_net* n);
size_t stt_net_samples(const stt_net* n);
/* covering audit; returns 0 when the max probe gap is within epsilon,
 * 2 when not, -1 on error (see stt_last_error_code) */
int stt_net_verify(const stt_net* n, const stt_task* t, size_t probes,
                   uint64_t seed, double* max_gap);
/* "t,y_1..y_n,piece" rows; manifest_hex (optional) becomes a comment line */
char* stt_net_csv(const stt_net* n, const char* manifest_hex);

/* -------------------------------------------------------------- synthesis */

/* Degree/strategy are explicit; the search budget comes from the task
 * bundle's synthesis block (defaults when absent). */
stt_synthesis* stt_synthesize(const stt_task* t, const stt_net* n, int degree,
                              int strategy);
void stt_synthesis_free(stt_synthesis* s);

double stt_synthesis_eta_star(const stt_synthesis* s);
int stt_synthesis_optimal(const stt_synthesis* s);
/* new tube handle carrying the synthesis slack; manifest_hex optional */
stt_tube* stt_synthesis_tube(const stt_synthesis* s, const char* manifest_hex);
char* stt_synthesis_report_json(const stt_synthesis* s, const char* manifest_hex);

/* ------------------------------------------------------------------ tubes */

stt_tube* stt_tube_load(const char* path);
stt_tube* stt_tube_parse(const char* json_text);
void stt_tube_free(stt_tube* tb);

char* stt_tube_json(const stt_tube* tb);
size_t stt_tube_dimension(const stt_tube* tb);
int stt_tube_degree(const stt_tube* tb);
double stt_tube_horizon(const stt_tube* tb);
double stt_tube_eval(const stt_tube* tb, size_t dim, int side, double t);
/* returns 1 and fills *eta_star when the document carried the slack */
int stt_tube_eta(const stt_tube* tb, double* eta_star);

/* brute-force tube/task oracle; returns 0 when it ran (violations reported
 * through *violations), -1 when it could not run */
int stt_tube_check(const stt_tube* tb, const stt_task* t, size_t time_steps,
                   size_t edge_steps, size_t* violations);
char* stt_tube_check_report_json(const stt_tube* tb, const stt_task* t,
                                 size_t time_steps, size_t edge_steps);

/* ---------------------------------------------------------------- certify */

/* margin = eta_star + L * epsilon; returns it and sets *pass */
double stt_check_certificate(double eta_star, double L, double epsilon, int* pass);
double stt_combine_lipschitz(double l_lower, double l_upper);

/* Theorem-style margin check plus the independent containment oracle. The
 * tube document must carry eta_star (synthesis output does). */
stt_certificate* stt_certify(const stt_tube* tb, const stt_task* t, double epsilon,
                             int method, uint64_t seed);
void stt_certificate_free(stt_certificate* c);
int stt_certificate_pass(const stt_certificate* c);
int stt_certificate_margin_pass(const stt_certificate* c);
double stt_certificate_margin(const stt_certificate* c);
char* stt_certificate_json(const stt_certificate* c, const char* manifest_hex);

/* --------------------------------------------------------------- simulate */

/* Closed-loop run of a builtin plant under the funnel controller tracking
 * the tube. plant NULL/"", dt <= 0 and wbar < 0 fall back to the bundle's
 * simulation block; the start state always comes from the bundle. */
stt_trajectory* stt_simulate(const stt_task* t, const stt_tube* tb,
                             const char* plant, double dt, double wbar,
                             uint64_t seed);
void stt_trajectory_free(stt_trajectory* tr);

int stt_trajectory_pass(const stt_trajectory* tr);
char* stt_trajectory_verdict_json(const stt_trajectory* tr);
char* stt_trajectory_csv(const stt_trajectory* tr, const char* manifest_hex);
size_t stt_trajectory_rows(const stt_trajectory* tr);
/* series: "t" | "x" | "y" | "u" | "lo" | "up" (tube bounds); writes
 * min(cap, rows) values of channel `index`, returns the count written */
int stt_trajectory_series(const stt_trajectory* tr, const char* series,
                          size_t index, double* out, size_t cap);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* STT_H */
