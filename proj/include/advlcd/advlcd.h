/* C interface to the advlcd library. All configs and results cross the
 * boundary as JSON text. Functions return ADVLCD_OK or an error status;
 * advlcd_last_error() describes the most recent failure on the calling
 * thread. Strings returned through char** are owned by the caller and
 * released with advlcd_string_free. */
#ifndef ADVLCD_H
#define ADVLCD_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define ADVLCD_API __declspec(dllexport)
#else
#define ADVLCD_API __attribute__((visibility("default")))
#endif

typedef enum advlcd_status {
  ADVLCD_OK = 0,
  ADVLCD_ERR_INVALID_ARGUMENT = 1,
  ADVLCD_ERR_INVALID_CONFIG = 2,
  ADVLCD_ERR_PARSE = 3,
  ADVLCD_ERR_SCHEMA = 4,
  ADVLCD_ERR_IO = 5,
  ADVLCD_ERR_INAPPLICABLE_FLIP = 6,
  ADVLCD_ERR_DID_NOT_CONVERGE = 7,
  ADVLCD_ERR_BUDGET_EXCEEDS_PAIRS = 8,
  ADVLCD_ERR_NO_CONNECTED_PAIR = 9,
  ADVLCD_ERR_DIMENSION_MISMATCH = 10,
  ADVLCD_ERR_DEGENERATE_DATA = 11,
  ADVLCD_ERR_DEGENERATE_LABELS = 12,
  ADVLCD_ERR_QUERY_BUDGET_EXHAUSTED = 13,
  ADVLCD_ERR_TOO_FEW_BLOCKS = 14,
  ADVLCD_ERR_INTERNAL = 15
} advlcd_status;

typedef struct advlcd_dataset advlcd_dataset;
typedef struct advlcd_target advlcd_target;

ADVLCD_API const char* advlcd_version(void);
ADVLCD_API const char* advlcd_last_error(void);
ADVLCD_API const char* advlcd_status_name(int status);
ADVLCD_API void advlcd_string_free(char* text);

/* Validates a config and returns it with every default filled in.
 * kind: "generator", "target", "attack" or "bench". NULL or "" json means
 * all defaults (not allowed for "bench"). */
ADVLCD_API int advlcd_config_echo(const char* kind, const char* json, char** canonical_json);

/* 32 hex digits identifying `text`. */
ADVLCD_API int advlcd_hash_text(const char* text, char** hex);

ADVLCD_API int advlcd_generate(const char* generator_json, advlcd_dataset** out);
ADVLCD_API int advlcd_dataset_read(const char* path, advlcd_dataset** out);
ADVLCD_API int advlcd_dataset_write(const advlcd_dataset* ds, const char* path);
ADVLCD_API int advlcd_dataset_counts(const advlcd_dataset* ds, size_t* total, size_t* train,
                                     size_t* test);
ADVLCD_API void advlcd_dataset_free(advlcd_dataset* ds);

/* Trains on the train split; metrics_json (optional) receives accuracies. */
ADVLCD_API int advlcd_target_train(const advlcd_dataset* ds, const char* options_json,
                                   advlcd_target** out, char** metrics_json);
ADVLCD_API int advlcd_target_save(const advlcd_target* target, const char* path);
ADVLCD_API int advlcd_target_load(const char* path, advlcd_target** out);
ADVLCD_API int advlcd_target_evaluate(const advlcd_target* target, const advlcd_dataset* ds,
                                      char** metrics_json);
ADVLCD_API void advlcd_target_free(advlcd_target* target);

/* Attacks the test split of `ds` (every graph if it has no test split).
 * oracle_mode: "score" (default when NULL) or "label". */
ADVLCD_API int advlcd_attack(const advlcd_target* target, const advlcd_dataset* ds,
                             const char* attack_json, const char* oracle_mode, size_t workers,
                             int include_records, char** summary_json);

/* Runs a benchmark spec; writes every output under out_dir and returns a
 * short JSON digest of the results. */
ADVLCD_API int advlcd_bench(const char* spec_json, size_t workers, const char* out_dir,
                            char** result_json);

/* Re-ranks a result-table CSV. out_dir (optional) receives rank.json,
 * rank.csv and cd.txt. */
ADVLCD_API int advlcd_rank(const char* table_csv_path, double alpha, const char* out_dir,
                           char** report_json, char** cd_text);

#ifdef __cplusplus
}
#endif

#endif
