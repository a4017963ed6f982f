/* SPDX-License-Identifier: Apache-2.0
 * Copyright 2026 The kgcd Authors
 *
 * C interface to the kgcd constrained decoder. All objects are opaque
 * handles. Every function that can fail returns a kgcd_status; on failure
 * kgcd_last_error() describes the problem (the message is thread-local and
 * valid until the next failing call on the same thread).
 *
 * Strings returned through char** must be released with kgcd_string_free().
 * Strings returned as const char* are owned by the handle they came from.
 */
#ifndef KGCD_KGCD_H_
#define KGCD_KGCD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(KGCD_BUILDING_LIBRARY)
#define KGCD_API __attribute__((visibility("default")))
#else
#define KGCD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kgcd_status {
  KGCD_OK = 0,
  KGCD_ERR_INVALID_ARGUMENT = 1,
  KGCD_ERR_IO = 2,
  KGCD_ERR_FORMAT = 3,
  KGCD_ERR_TOKENIZE = 4,
  KGCD_ERR_ILLEGAL_TOKEN = 5,
  KGCD_ERR_QUERY_PARSE = 6,
  KGCD_ERR_UNKNOWN_SEQUENCE = 7,
  KGCD_ERR_INTERNAL = 99
} kgcd_status;

typedef enum kgcd_mode {
  KGCD_MODE_FULL = 0,
  KGCD_MODE_NO_PRUNING = 1,
  KGCD_MODE_UNCONSTRAINED = 2
} kgcd_mode;

typedef struct kgcd_index kgcd_index;
typedef struct kgcd_engine kgcd_engine;
typedef struct kgcd_result kgcd_result;
typedef struct kgcd_session kgcd_session;

KGCD_API const char* kgcd_version(void);
KGCD_API const char* kgcd_last_error(void);
KGCD_API const char* kgcd_status_name(kgcd_status status);
KGCD_API void kgcd_string_free(char* s);

/* ---- Indices ---------------------------------------------------------- */

/* labels_path may be NULL (labels are then derived from keys). */
KGCD_API kgcd_status kgcd_index_build(const char* triples_path,
                                      const char* labels_path,
                                      kgcd_index** out);
KGCD_API kgcd_status kgcd_index_load(const char* path, kgcd_index** out);
KGCD_API kgcd_status kgcd_index_save(const kgcd_index* index, const char* path);
KGCD_API void kgcd_index_free(kgcd_index* index);
KGCD_API kgcd_status kgcd_index_counts(const kgcd_index* index,
                                       size_t* entities, size_t* relations,
                                       size_t* triples);

/* ---- Fixtures --------------------------------------------------------- */

/* spec_json fields (all optional): entities, relations, density, questions,
 * seed, label_alphabet, label_length, mix {one_hop, two_hop, count, ask}.
 * Writes triples.tsv, labels.tsv and dataset.tsv into out_dir. */
KGCD_API kgcd_status kgcd_generate_fixture(const char* spec_json,
                                           const char* out_dir);
/* Same spec plus new_entities and new_edges. Writes t0/ and t1/ fixture
 * directories and delta.tsv into out_dir. */
KGCD_API kgcd_status kgcd_generate_evolution(const char* spec_json,
                                             const char* out_dir);
/* The Michael Bay example graph and its questions. */
KGCD_API kgcd_status kgcd_generate_figure1(const char* out_dir);

/* ---- Decoding --------------------------------------------------------- */

typedef struct kgcd_decode_options {
  int mode;          /* kgcd_mode */
  int beam_size;     /* default 10 */
  int max_len;       /* default 128 */
  int max_patterns;  /* default 4 */
  int strict_pairs;  /* tails after a concrete head come from (h, r) pairs */
  const char* scorer; /* "uniform" (default) or "noisy-oracle:EPS" */
  uint64_t seed;
  /* Dataset file giving gold queries for the noisy oracle; may be NULL. */
  const char* gold_path;
  int expand_iris;   /* rewrite identifiers as <key> in query output */
  unsigned threads;  /* batch workers, 0 = hardware concurrency */
} kgcd_decode_options;

KGCD_API void kgcd_decode_options_init(kgcd_decode_options* options);

KGCD_API kgcd_status kgcd_engine_new(const kgcd_index* index,
                                     kgcd_engine** out);
KGCD_API void kgcd_engine_free(kgcd_engine* engine);
/* Decodes started before the swap finish against the previous index. */
KGCD_API kgcd_status kgcd_engine_swap(kgcd_engine* engine,
                                      const kgcd_index* index);

/* batch != 0 decodes the questions together; results are identical to the
 * sequential path. Per-question failures are reported in the result. */
KGCD_API kgcd_status kgcd_decode(kgcd_engine* engine,
                                 const kgcd_decode_options* options,
                                 const char* const* questions, size_t count,
                                 int batch, kgcd_result** out);
KGCD_API size_t kgcd_result_count(const kgcd_result* result);
/* JSON object: question, ranked [{query, logp}], answer {rank, query,
 * values} or null, diagnostics {steps, dead, unfinished, finished}, error. */
KGCD_API const char* kgcd_result_json(const kgcd_result* result, size_t i);
/* NULL when question i decoded successfully. */
KGCD_API const char* kgcd_result_error(const kgcd_result* result, size_t i);
KGCD_API size_t kgcd_result_ranked_count(const kgcd_result* result, size_t i);
KGCD_API const char* kgcd_result_query(const kgcd_result* result, size_t i,
                                       size_t rank);
KGCD_API double kgcd_result_logp(const kgcd_result* result, size_t i,
                                 size_t rank);
KGCD_API void kgcd_result_free(kgcd_result* result);

/* ---- Evaluation ------------------------------------------------------- */

/* Beam sweep over modes x beams. csv_out receives the report table and
 * svg_out (optional) a plot. timing_repetitions 0 leaves mean_ms as "-". */
KGCD_API kgcd_status kgcd_eval(kgcd_engine* engine,
                               const kgcd_decode_options* options,
                               const char* dataset_path, const int* modes,
                               size_t mode_count, const int* beams,
                               size_t beam_count, int timing_repetitions,
                               char** csv_out, char** svg_out);

/* Decodes the delta questions against t0, swaps the engine to t1 and
 * decodes again. report_out receives a tab-separated table. If answered_t0 /
 * answered_t1 are non-NULL they receive the answered counts. */
KGCD_API kgcd_status kgcd_swap_demo(const kgcd_index* t0, const kgcd_index* t1,
                                    const char* delta_path,
                                    const kgcd_decode_options* options,
                                    char** report_out, size_t* answered_t0,
                                    size_t* answered_t1);

/* ---- Step API --------------------------------------------------------- */

/* A session holds one index and any number of sequences named by caller
 * ids. Calls on distinct sequence ids may run concurrently. Masks are packed
 * bitsets: token i is bit (i % 8) of byte (i / 8). */
KGCD_API kgcd_status kgcd_session_open(const char* index_path,
                                       int max_patterns, int strict_pairs,
                                       kgcd_session** out);
KGCD_API kgcd_status kgcd_session_from_index(const kgcd_index* index,
                                             int max_patterns, int strict_pairs,
                                             kgcd_session** out);
KGCD_API void kgcd_session_close(kgcd_session* session);
KGCD_API size_t kgcd_session_vocab_size(const kgcd_session* session);
/* Token text, or NULL for an out-of-range id. */
KGCD_API const char* kgcd_session_token(const kgcd_session* session,
                                        uint32_t token);
KGCD_API kgcd_status kgcd_session_token_id(const kgcd_session* session,
                                           const char* text, uint32_t* out);
KGCD_API size_t kgcd_session_mask_bytes(const kgcd_session* session);

KGCD_API kgcd_status kgcd_seq_begin(kgcd_session* session, uint64_t seq);
KGCD_API kgcd_status kgcd_seq_fork(kgcd_session* session, uint64_t from,
                                   uint64_t to);
KGCD_API kgcd_status kgcd_seq_release(kgcd_session* session, uint64_t seq);
KGCD_API kgcd_status kgcd_seq_advance(kgcd_session* session, uint64_t seq,
                                      uint32_t token);
KGCD_API kgcd_status kgcd_seq_allowed_mask(kgcd_session* session, uint64_t seq,
                                           int mode, uint8_t* out,
                                           size_t out_len);
KGCD_API kgcd_status kgcd_seq_finished(kgcd_session* session, uint64_t seq,
                                       int* finished);

#ifdef __cplusplus
}
#endif

#endif /* KGCD_KGCD_H_ */
