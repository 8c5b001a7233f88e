/* C interface to the tweet-mining pipeline. All state lives behind the
 * opaque em_pipeline handle; functions return em_status codes and the last
 * error message is retained on the handle. */
#ifndef EDUMINE_H
#define EDUMINE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define EM_API __declspec(dllexport)
#elif defined(__GNUC__)
#define EM_API __attribute__((visibility("default")))
#else
#define EM_API
#endif

typedef enum em_status {
  EM_OK = 0,
  EM_ERR_CONFIG = 1,  /* usage / configuration error */
  EM_ERR_INPUT = 2,   /* input data error */
  EM_ERR_INTERNAL = 3 /* internal failure */
} em_status;

typedef struct em_pipeline em_pipeline;

EM_API const char* em_version(void);

EM_API em_pipeline* em_pipeline_new(void);
EM_API void em_pipeline_free(em_pipeline* p);

/* Merge a flat key = value config file into the handle's configuration. */
EM_API em_status em_pipeline_load_config(em_pipeline* p, const char* path);

/* Set one configuration key (same keys as the config file). Overrides any
 * value loaded from a file. */
EM_API em_status em_pipeline_set(em_pipeline* p, const char* key, const char* value);

/* stage is one of: "filter", "geotag", "classify", "aggregate", "run",
 * "check". After EM_OK, em_pipeline_summary() describes what ran. */
EM_API em_status em_pipeline_run_stage(em_pipeline* p, const char* stage);

/* Message for the most recent failing call; empty string if none. The
 * pointer stays valid until the next call on the same handle. */
EM_API const char* em_pipeline_error(const em_pipeline* p);

/* Per-stage counts and output digests of the most recent successful stage,
 * one line per stage. */
EM_API const char* em_pipeline_summary(const em_pipeline* p);

#ifdef __cplusplus
}
#endif

#endif /* EDUMINE_H */
