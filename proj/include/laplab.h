/*
 * lap-lab C API: a shared-library interface over the layered-media wave
 * laboratory. Configs are opaque handles; commands run against a config and
 * write their artifacts (CSV/JSON + manifest) to an output directory.
 *
 * Return codes follow the CLI convention: 0 success, 2 verdict failure
 * (a falsifiable check came out negative), any other value an error. Call
 * laplab_last_error() for the message belonging to the calling thread.
 */
#ifndef LAPLAB_H
#define LAPLAB_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct laplab_config laplab_config;

enum laplab_status {
  LAPLAB_OK = 0,
  LAPLAB_VERDICT_FAIL = 2,
  LAPLAB_ERR_CONFIG = 3,
  LAPLAB_ERR_PRECONDITION = 4,
  LAPLAB_ERR_NO_CONVERGENCE = 5,
  LAPLAB_ERR_IO = 6,
  LAPLAB_ERR_INVALID_HANDLE = 7,
  LAPLAB_ERR_INTERNAL = 8
};

/* Library version string, e.g. "0.1.0". Static storage; do not free. */
const char* laplab_version(void);

/* Message of the last failing call on this thread. Static storage. */
const char* laplab_last_error(void);

/* Parse a config. Returns NULL on failure (see laplab_last_error). */
laplab_config* laplab_config_from_file(const char* path);
laplab_config* laplab_config_from_json(const char* json_text);
void laplab_config_free(laplab_config* cfg);

/* Dotted-path override, e.g. ("grid.h", "0.125") or ("medium.nus", "[1,2]").
 * Values parse as JSON when possible and fall back to strings. */
int laplab_config_override(laplab_config* cfg, const char* dotted_key,
                           const char* value);

/* Canonical content hash of the config document (16 hex chars).
 * The result must be released with laplab_string_free. */
char* laplab_config_hash(const laplab_config* cfg);

/* Run a command: validate | solve | sweep | eigscan | identity | oracle.
 * out_dir overrides the config's output.dir when non-NULL/non-empty.
 * On request, *manifest_json receives the run manifest (caller frees with
 * laplab_string_free); pass NULL to skip. Returns 0 / 2 / error code. */
int laplab_run(laplab_config* cfg, const char* command, const char* out_dir,
               char** manifest_json);

void laplab_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* LAPLAB_H */
