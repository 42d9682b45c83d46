#ifndef BFT_BFT_H
#define BFT_BFT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BFT_BUILDING_LIBRARY)
#    define BFT_API __declspec(dllexport)
#  else
#    define BFT_API __declspec(dllimport)
#  endif
#else
#  define BFT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible call. */
enum {
  BFT_OK = 0,
  BFT_ERR_INVALID_ARGUMENT = 1,
  BFT_ERR_INVALID_BEARING = 2,
  BFT_ERR_COLLISION = 3,
  BFT_ERR_HYPOTHESIS = 4,
  BFT_ERR_NOT_LOCALIZABLE = 5,
  BFT_ERR_AMBIGUOUS_RIGIDITY = 6,
  BFT_ERR_GAIN_CONDITION = 7,
  BFT_ERR_NUMERICAL_BLOWUP = 8,
  BFT_ERR_CONFIG = 9,
  BFT_ERR_PARSE = 10,
  BFT_ERR_VALIDATION = 11,
  BFT_ERR_IO = 12,
  BFT_ERR_BUFFER_TOO_SMALL = 13,
  BFT_ERR_NULL_POINTER = 14,
  BFT_ERR_INTERNAL = 15
};

enum { BFT_VERDICT_PASS = 0, BFT_VERDICT_FAIL = 1, BFT_VERDICT_INCONCLUSIVE = 2 };

enum { BFT_TERMINATION_COMPLETED = 0, BFT_TERMINATION_COLLISION = 1, BFT_TERMINATION_BLOWUP = 2 };

typedef struct bft_scenario bft_scenario;
typedef struct bft_result bft_result;

/*
 * Text outputs use caller buffers. On entry *len is the capacity of buf; on
 * return it holds the size needed including the terminating NUL. If buf is
 * NULL or too small, nothing is copied and BFT_ERR_BUFFER_TOO_SMALL is
 * returned, so calling once with *len = 0 queries the size.
 */

BFT_API const char* bft_version(void);
BFT_API const char* bft_status_name(int status);
/* Message of the last failed call on this thread ("" if none). */
BFT_API const char* bft_last_error(void);

/* Newline-separated names of the bundled scenarios. */
BFT_API int bft_builtin_names(char* buf, size_t* len);

/* Scenario constructors parse only; call bft_scenario_validate for the
 * cross-checks (bft_run repeats them). */
BFT_API int bft_scenario_from_file(const char* path, bft_scenario** out);
BFT_API int bft_scenario_from_json(const char* text, size_t text_len, bft_scenario** out);
BFT_API int bft_scenario_builtin(const char* name, bft_scenario** out);
BFT_API int bft_scenario_clone(const bft_scenario* scenario, bft_scenario** out);
BFT_API void bft_scenario_destroy(bft_scenario* scenario);

BFT_API int bft_scenario_set_seed(bft_scenario* scenario, uint64_t seed);
/* law is 'A' or 'B'. */
BFT_API int bft_scenario_set_law(bft_scenario* scenario, char law);
BFT_API int bft_scenario_set_boundary_layer(bft_scenario* scenario, double epsilon);
BFT_API int bft_scenario_set_sign_flipped_estimator(bft_scenario* scenario, int enabled);
BFT_API int bft_scenario_set_decimation(bft_scenario* scenario, int decimation);
BFT_API int bft_scenario_set_override_rigidity(bft_scenario* scenario, int enabled);
BFT_API int bft_scenario_set_duration(bft_scenario* scenario, double seconds);

BFT_API int bft_scenario_name(const bft_scenario* scenario, char* buf, size_t* len);
BFT_API int bft_scenario_seed(const bft_scenario* scenario, uint64_t* seed);

/* Writes the violations, one per line, and their count. Returns BFT_OK even
 * when violations exist; *count == 0 means the scenario is valid. */
BFT_API int bft_scenario_validate(const bft_scenario* scenario, size_t* count, char* buf,
                                  size_t* len);
BFT_API int bft_scenario_warnings(const bft_scenario* scenario, size_t* count, char* buf,
                                  size_t* len);
BFT_API int bft_scenario_to_json(const bft_scenario* scenario, char* buf, size_t* len);
BFT_API int bft_scenario_rigidity_report(const bft_scenario* scenario, char* buf, size_t* len);

BFT_API int bft_run(const bft_scenario* scenario, bft_result** out);
BFT_API void bft_result_destroy(bft_result* result);

BFT_API int bft_result_verdict(const bft_result* result, int* verdict);
BFT_API int bft_result_termination(const bft_result* result, int* termination, double* time,
                                   int* agent);
BFT_API int bft_result_sample_count(const bft_result* result, size_t* count);
BFT_API int bft_result_summary_json(const bft_result* result, char* buf, size_t* len);
BFT_API int bft_result_report_text(const bft_result* result, char* buf, size_t* len);
/* Writes the run artifacts into dir. */
BFT_API int bft_result_write(bft_result* result, const char* dir);
/* Paths written by the last bft_result_write, one per line. */
BFT_API int bft_result_files(const bft_result* result, char* buf, size_t* len);

/* Runs one simulation per seed on up to `threads` workers (0 = all cores),
 * each writing to dir/seed-<seed>, plus the aggregate dir/sweep.json.
 * *all_pass is 1 when every run passed. */
BFT_API int bft_sweep(const bft_scenario* scenario, const uint64_t* seeds, size_t seed_count,
                      const char* dir, unsigned threads, int* all_pass);

#ifdef __cplusplus
}
#endif

#endif /* BFT_BFT_H */
