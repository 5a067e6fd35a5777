/*
 * nsaqa — rules-based analysis of platform dives from symbol streams.
 *
 * C API over the analysis core. Every object is an opaque handle owned by
 * the library; functions return NSAQA_OK or an error class, and on failure
 * fill *err with a message to release via nsaqa_string_free. Strings
 * returned through out-parameters are NUL-terminated UTF-8 owned by the
 * caller (release with nsaqa_string_free).
 */
#ifndef NSAQA_H
#define NSAQA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nsaqa_status {
    NSAQA_OK = 0,
    NSAQA_ERR_INPUT = 1,    /* malformed documents, schema or config problems */
    NSAQA_ERR_ANALYSIS = 2, /* valid input the rules cannot analyze */
    NSAQA_ERR_INTERNAL = 3
} nsaqa_status;

typedef struct nsaqa_stream nsaqa_stream;
typedef struct nsaqa_config nsaqa_config;
typedef struct nsaqa_reference nsaqa_reference;
typedef struct nsaqa_report nsaqa_report;
typedef struct nsaqa_evaluator nsaqa_evaluator;

const char* nsaqa_version(void);
void nsaqa_string_free(char* s);

/* ---- configuration ---- */
nsaqa_config* nsaqa_config_new(void);
void nsaqa_config_free(nsaqa_config* cfg);
/* Sets one analyzer threshold by name, e.g. ("som_angle_threshold_deg", "75"). */
nsaqa_status nsaqa_config_set(nsaqa_config* cfg, const char* key, const char* value,
                              char** err);

/* ---- symbol streams ---- */
nsaqa_status nsaqa_stream_parse(const char* data, size_t len, nsaqa_stream** out,
                                char** err);
nsaqa_status nsaqa_stream_serialize(const nsaqa_stream* s, char** out, size_t* out_len,
                                    char** err);
const char* nsaqa_stream_clip_id(const nsaqa_stream* s); /* borrowed pointer */
void nsaqa_stream_free(nsaqa_stream* s);

/* ---- recognition and segmentation (JSON results) ---- */
nsaqa_status nsaqa_recognize_json(const nsaqa_stream* s, const nsaqa_config* cfg,
                                  char** out_json, char** err);
nsaqa_status nsaqa_segment_json(const nsaqa_stream* s, const nsaqa_config* cfg,
                                char** out_json, char** err);

/* ---- reference distributions ---- */
nsaqa_status nsaqa_reference_build(const nsaqa_stream* const* streams, size_t count,
                                   const nsaqa_config* cfg, const char* provenance,
                                   int threads, nsaqa_reference** out, char** err);
nsaqa_status nsaqa_reference_parse(const char* data, size_t len, nsaqa_reference** out,
                                   char** err);
nsaqa_status nsaqa_reference_serialize(const nsaqa_reference* ref, char** out,
                                       size_t* out_len, char** err);
void nsaqa_reference_free(nsaqa_reference* ref);

/* ---- full analysis ---- */
/* weights_json: optional {"aspect": weight, ...}; templates_json: optional
 * sentence library replacing the built-in one. Pass NULL for defaults. */
nsaqa_status nsaqa_analyze(const nsaqa_stream* s, const nsaqa_reference* ref,
                           const nsaqa_config* cfg, const char* weights_json,
                           const char* templates_json, nsaqa_report** out, char** err);
nsaqa_status nsaqa_report_html(const nsaqa_report* r, char** out, size_t* out_len,
                               char** err);
nsaqa_status nsaqa_report_json(const nsaqa_report* r, char** out, size_t* out_len,
                               char** err);
double nsaqa_report_overall(const nsaqa_report* r);
void nsaqa_report_free(nsaqa_report* r);

/* ---- synthetic corpus ---- */
/* Deterministic synthetic dive #index of the corpus drawn from `seed`.
 * out_ground_truth_json receives the generator's ground-truth sidecar. */
nsaqa_status nsaqa_synth_sample(uint64_t seed, uint64_t index, double noise_sigma,
                                double pose_dropout, nsaqa_stream** out_stream,
                                char** out_ground_truth_json, char** err);

/* ---- evaluation against ground truth ---- */
nsaqa_evaluator* nsaqa_evaluator_new(const nsaqa_config* cfg);
void nsaqa_evaluator_free(nsaqa_evaluator* ev);
nsaqa_status nsaqa_evaluator_add(nsaqa_evaluator* ev, const nsaqa_stream* s,
                                 const char* ground_truth_json, char** err);
nsaqa_status nsaqa_evaluator_summary_json(const nsaqa_evaluator* ev, char** out_json,
                                          char** err);

#ifdef __cplusplus
}
#endif

#endif /* NSAQA_H */
