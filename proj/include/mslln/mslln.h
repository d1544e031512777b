#ifndef MSLLN_MSLLN_H
#define MSLLN_MSLLN_H

/* C interface to the simulation library. Every function returns a status
 * code; on failure mslln_last_error() holds a message for the calling thread.
 * Handles are opaque and owned by the caller until destroyed. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MSLLN_BUILDING_LIBRARY)
#    define MSLLN_API __declspec(dllexport)
#  else
#    define MSLLN_API __declspec(dllimport)
#  endif
#else
#  define MSLLN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mslln_status {
    MSLLN_OK = 0,
    MSLLN_ERR_INVALID_ARGUMENT = 1, /* null pointer, unknown key, buffer too small */
    MSLLN_ERR_VALIDATION = 2,       /* a parameter violates a hypothesis */
    MSLLN_ERR_CONFIG = 3,           /* config syntax, unknown or duplicate key */
    MSLLN_ERR_MOMENT = 4,           /* requested moment does not exist */
    MSLLN_ERR_CAP = 5,              /* a hard cap would be exceeded */
    MSLLN_ERR_DEGENERATE = 6,
    MSLLN_ERR_ILL_POSED = 7,
    MSLLN_ERR_IO = 8,
    MSLLN_ERR_INTERNAL = 9
} mslln_status;

typedef enum mslln_regime {
    MSLLN_REGIME_LRD_DOMINANT = 0,
    MSLLN_REGIME_HT_DOMINANT = 1,
    MSLLN_REGIME_CLT = 2,
    MSLLN_REGIME_BIFURCATION = 3
} mslln_regime;

typedef struct mslln_config mslln_config;
typedef struct mslln_result mslln_result;

MSLLN_API const char* mslln_version(void);
MSLLN_API const char* mslln_status_string(mslln_status status);
/* Message of the last failing call on this thread ("" if none). */
MSLLN_API const char* mslln_last_error(void);

/* scenario: rates, decompose, sa, autocov, appell, simulate */
MSLLN_API mslln_status mslln_config_default(const char* scenario, mslln_config** out);
MSLLN_API mslln_status mslln_config_parse(const char* text, mslln_config** out);
MSLLN_API mslln_status mslln_config_load(const char* path, mslln_config** out);
/* value uses the config file syntax; bare words are accepted for strings. */
MSLLN_API mslln_status mslln_config_set(mslln_config* config, const char* key, const char* value);
MSLLN_API mslln_status mslln_config_validate(const mslln_config* config);
/* Writes at most `capacity` bytes including the terminator; `required`
 * (optional) receives the full size including the terminator. */
MSLLN_API mslln_status mslln_config_serialize(const mslln_config* config, char* buffer, size_t capacity,
                                              size_t* required);
MSLLN_API mslln_status mslln_config_scenario(const mslln_config* config, const char** scenario);
MSLLN_API void mslln_config_destroy(mslln_config* config);

/* Validates, runs and writes all reports. Per-point failures do not make the
 * call fail; query them with mslln_result_failure_count. */
MSLLN_API mslln_status mslln_run(const mslln_config* config, mslln_result** out);
/* Plot-ready tables from the reports in `dir`. format: csv or json. */
MSLLN_API mslln_status mslln_report(const char* dir, const char* format, mslln_result** out);

MSLLN_API size_t mslln_result_file_count(const mslln_result* result);
/* Path relative to the output directory, or NULL when out of range. */
MSLLN_API const char* mslln_result_file_path(const mslln_result* result, size_t index);
MSLLN_API const char* mslln_result_file_sha256(const mslln_result* result, size_t index);
MSLLN_API const char* mslln_result_manifest_path(const mslln_result* result);
MSLLN_API size_t mslln_result_failure_count(const mslln_result* result);
MSLLN_API const char* mslln_result_failure_message(const mslln_result* result, size_t index);
MSLLN_API void mslln_result_destroy(mslln_result* result);

/* Numeric entry points. alpha = INFINITY means a light tail. */
MSLLN_API mslln_status mslln_theoretical_exponent(double sigma, double sigma_bar, double alpha, double* exponent,
                                                  mslln_regime* regime);
MSLLN_API mslln_status mslln_sa_rate(double chi, double sigma, double alpha, double* gamma0, int* no_rate);
MSLLN_API mslln_status mslln_power_law_moment(double x_min, double beta, double r, double* out);
MSLLN_API mslln_status mslln_replication_seed(uint64_t base_seed, uint64_t grid_index, uint64_t replication,
                                              uint64_t* out);

#ifdef __cplusplus
}
#endif

#endif
