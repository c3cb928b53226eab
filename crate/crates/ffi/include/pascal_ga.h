#ifndef PASCAL_GA_H
#define PASCAL_GA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PgaStatus {
  PGA_STATUS_OK = 0,
  PGA_STATUS_NULL_POINTER = 1,
  PGA_STATUS_INVALID_ARGUMENT = 2,
  PGA_STATUS_CONFIG = 3,
  PGA_STATUS_DOMAIN = 4,
  PGA_STATUS_EVALUATION = 5,
  PGA_STATUS_IO = 6,
  PGA_STATUS_BUFFER_TOO_SMALL = 7,
  PGA_STATUS_PANIC = 8,
} PgaStatus;

// The result of one GA run.
typedef struct PgaRun PgaRun;

// A benchmark task with its configuration and generated instance.
typedef struct PgaTask PgaTask;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Byte length of the calling thread's last error message, without the NUL.
size_t pga_last_error_length(void);

// Copies the calling thread's last error message into `buf` as a C string.
// Does not overwrite the stored message.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
enum PgaStatus pga_last_error_message(char *buf, size_t len);

// Writes the `m` Pascal weights into `out`.
//
// # Safety
// `out` must be null or point to `len` writable doubles.
enum PgaStatus pga_pascal_weights(size_t m, double *out, size_t len);

// Variance of a Pascal-weighted offspring relative to one parent.
//
// # Safety
// `out` must be null or point to a writable double.
enum PgaStatus pga_variance_ratio(size_t m, double *out);

// Sum of the n-th shallow diagonal of Pascal's triangle, F(n+1).
//
// # Safety
// `out` must be null or point to a writable u64.
enum PgaStatus pga_fibonacci_diagonal(uint32_t n, uint64_t *out);

// Builds a task (`pid`, `fir`, `wireless`, `tsp` or `sphere`) with default
// settings, then applies `config_json`, a flat object of dotted keys such as
// `{"generations": 20, "tsp.cities": 12}`. `config_json` may be null.
//
// # Safety
// String arguments must be null or NUL-terminated; `out` must be null or writable.
enum PgaStatus pga_task_new(const char *name, const char *config_json, struct PgaTask **out);

// # Safety
// `task` must be null or a handle from [`pga_task_new`] not yet freed.
void pga_task_free(struct PgaTask *task);

// Fitness of a real-coded genome (pid, fir, sphere).
//
// # Safety
// `genes` must point to `len` doubles; `out` must be null or writable.
enum PgaStatus pga_task_evaluate_real(const struct PgaTask *task,
                                      const double *genes,
                                      size_t len,
                                      double *out);

// Length of a tour (tsp).
//
// # Safety
// `tour` must point to `len` city indices; `out` must be null or writable.
enum PgaStatus pga_task_evaluate_tour(const struct PgaTask *task,
                                      const size_t *tour,
                                      size_t len,
                                      double *out);

// Utility of a power allocation with per-link modulation orders 2, 4, 16 or 64 (wireless).
//
// # Safety
// `powers` and `orders` must each point to `len` values; `out` must be null or writable.
enum PgaStatus pga_task_evaluate_wireless(const struct PgaTask *task,
                                          const double *powers,
                                          const uint32_t *orders,
                                          size_t len,
                                          double *out);

// Runs the GA once with `method` (e.g. `pwr3`, `arith`, `pmx`) and `seed`.
//
// # Safety
// `task` must be a live handle; `method` must be NUL-terminated; `out` must be writable.
enum PgaStatus pga_run(const struct PgaTask *task,
                       const char *method,
                       uint64_t seed,
                       struct PgaRun **out);

// # Safety
// `run` must be null or a handle from [`pga_run`] not yet freed.
void pga_run_free(struct PgaRun *run);

// Champion fitness, or NaN for a null handle.
//
// # Safety
// `run` must be null or a live handle.
double pga_run_champion_fitness(const struct PgaRun *run);

// Number of recorded generations, 0 for a null handle.
//
// # Safety
// `run` must be null or a live handle.
size_t pga_run_generations(const struct PgaRun *run);

// Best-so-far fitness per generation.
//
// # Safety
// `run` must be a live handle; `out` must point to `len` writable doubles.
enum PgaStatus pga_run_best_trace(const struct PgaRun *run, double *out, size_t len);

// Champion genome as JSON, e.g. `{"kind":"real","genes":[...]}`.
//
// # Safety
// `run` must be a live handle; `buf` must point to `len` writable bytes.
enum PgaStatus pga_run_champion_json(const struct PgaRun *run, char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PASCAL_GA_H */
