/* dcacrn: dynamic functional connectivity classification pipeline.
 *
 * C interface over the core library. All functions that can fail return a
 * status code and leave a human-readable message in the context. Handles
 * are opaque; free them with the matching *_free call.
 */
#ifndef DCACRN_H
#define DCACRN_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define DCACRN_OK 0
#define DCACRN_ERR_GENERIC 1
#define DCACRN_ERR_CONFIG 2
#define DCACRN_ERR_DATA 3
#define DCACRN_ERR_NUMERIC 4

typedef struct dcacrn_ctx dcacrn_ctx;

dcacrn_ctx* dcacrn_ctx_new(void);
void dcacrn_ctx_free(dcacrn_ctx* ctx);

/* Message from the most recent failing call on this context; empty string
 * when the last call succeeded. The pointer stays valid until the next
 * call on the same context. */
const char* dcacrn_last_error(const dcacrn_ctx* ctx);

const char* dcacrn_version(void);

/* Runs one pipeline command against a JSON run configuration.
 * Commands: "synth", "build-dfcn", "train", "eval", "attn", "ttest". */
int dcacrn_run(dcacrn_ctx* ctx, const char* command, const char* config_json);

/* Read access to one dFCN tensor file. */
typedef struct dcacrn_dfcn dcacrn_dfcn;

dcacrn_dfcn* dcacrn_dfcn_open(dcacrn_ctx* ctx, const char* path);
void dcacrn_dfcn_free(dcacrn_dfcn* t);
size_t dcacrn_dfcn_windows(const dcacrn_dfcn* t);
size_t dcacrn_dfcn_regions(const dcacrn_dfcn* t);
int dcacrn_dfcn_label(const dcacrn_dfcn* t);
/* Copies window w (regions * regions doubles, row-major) into out. */
int dcacrn_dfcn_window(dcacrn_ctx* ctx, const dcacrn_dfcn* t, size_t w, double* out);

#ifdef __cplusplus
}
#endif

#endif /* DCACRN_H */
