#ifndef NILMAX_NILMAX_H
#define NILMAX_NILMAX_H

#include <stddef.h>

#if defined(_WIN32)
#define NILMAX_API __declspec(dllexport)
#else
#define NILMAX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nilmax_status {
    NILMAX_OK = 0,
    NILMAX_INVALID_ARGUMENT = 1,
    NILMAX_DEGENERATE_METRIC = 2,
    NILMAX_BOUNDARY_INDEX = 3,
    NILMAX_TRUNCATION_INSUFFICIENT = 4,
    NILMAX_BIG_CELL_VIOLATION = 5,
    NILMAX_REGULARITY_VIOLATION = 6,
    NILMAX_STEP_UNSTABLE = 7,
    NILMAX_HOLOMORPHIC_POINT = 8,
    NILMAX_TOO_CLOSE_TO_CALL = 9,
    NILMAX_DEGENERATE_BOUNDARY = 10,
    NILMAX_DEGENERATE_DENOMINATOR = 11,
    NILMAX_UNCLASSIFIED = 12,
    NILMAX_SCHEMA_ERROR = 13,
    NILMAX_PARSE_ERROR = 14,
    NILMAX_IO_ERROR = 15,
    NILMAX_INTERNAL_ERROR = 99
} nilmax_status;

typedef enum nilmax_kind {
    NILMAX_KIND_DEGENERATE = 0,
    NILMAX_KIND_NOT_FRONT = 1,
    NILMAX_KIND_CUSPIDAL_EDGE = 2,
    NILMAX_KIND_SWALLOWTAIL = 3,
    NILMAX_KIND_CUSPIDAL_CROSS_CAP = 4
} nilmax_kind;

typedef struct nilmax_config nilmax_config;
typedef struct nilmax_result nilmax_result;

typedef struct nilmax_point_info {
    int kind;     /* nilmax_kind; tentative when decided == 0 */
    int decided;
    double margin;
    double re_bhat;
    double im_bhat;
    double im_bhat_prime;
    double n3;
} nilmax_point_info;

NILMAX_API const char* nilmax_version(void);
NILMAX_API const char* nilmax_status_name(nilmax_status status);
NILMAX_API const char* nilmax_kind_name(int kind);
/* Message of the last failing call on this thread; empty if none. */
NILMAX_API const char* nilmax_last_error(void);
/* Process exit code for a status: 0 ok, 2 schema or parse, 3 io, 1 otherwise. */
NILMAX_API int nilmax_exit_code(nilmax_status status);

NILMAX_API nilmax_status nilmax_config_load(const char* path, nilmax_config** out);
NILMAX_API nilmax_status nilmax_config_parse(const char* json_text, nilmax_config** out);
NILMAX_API void nilmax_config_free(nilmax_config* config);
/* Replaces the associated-family samples with the single angle (radians). */
NILMAX_API nilmax_status nilmax_config_set_lambda(nilmax_config* config, double angle);
NILMAX_API nilmax_status nilmax_config_set_degree(nilmax_config* config, int degree);
NILMAX_API nilmax_status nilmax_config_set_tol(nilmax_config* config, double tol);
/* Config with defaults filled in; release with nilmax_string_free. */
NILMAX_API nilmax_status nilmax_config_to_json(const nilmax_config* config, char** out);
NILMAX_API void nilmax_string_free(char* s);

/* command: build | classify | cauchy | verify | report. config may be NULL for verify and report. */
NILMAX_API nilmax_status nilmax_run(const char* command, const nilmax_config* config, const char* out_dir,
                                    nilmax_result** out);
NILMAX_API size_t nilmax_result_line_count(const nilmax_result* result);
NILMAX_API const char* nilmax_result_line(const nilmax_result* result, size_t index);
NILMAX_API size_t nilmax_result_artifact_count(const nilmax_result* result);
NILMAX_API const char* nilmax_result_artifact(const nilmax_result* result, size_t index);
NILMAX_API const char* nilmax_result_report_json(const nilmax_result* result);
/* 1 unless the result is a verify report with a failing invariant. */
NILMAX_API int nilmax_result_all_passed(const nilmax_result* result);
NILMAX_API void nilmax_result_free(nilmax_result* result);

NILMAX_API nilmax_status nilmax_classify_point(const nilmax_config* config, double re, double im,
                                               nilmax_point_info* out);

#ifdef __cplusplus
}
#endif

#endif
