#ifndef CLICKGRAPH_H
#define CLICKGRAPH_H

/* Generated from the Rust sources by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Similar-query retrieval method.
 */
typedef enum CgMethod {
  CgMethod_Cosine = 0,
  CgMethod_Jaccard = 1,
  CgMethod_JaccardBinary = 2,
  /**
   * Personalized PageRank; honors the `alpha` and `steps` arguments.
   */
  CgMethod_Ppr = 3,
} CgMethod;

/**
 * Edge weighting model.
 */
typedef enum CgModel {
  CgModel_Uf = 0,
  CgModel_UfIqf = 1,
  CgModel_UfwIqf = 2,
  CgModel_UfwIuf = 3,
} CgModel;

/**
 * Result of every fallible call. Non-`Ok` values leave a message in
 * the thread-local buffer behind `cg_last_error`.
 */
typedef enum CgStatus {
  CgStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  CgStatus_NullArgument = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  CgStatus_InvalidUtf8 = 2,
  CgStatus_Io = 3,
  /**
   * Malformed edge data.
   */
  CgStatus_Parse = 4,
  /**
   * Graph construction failed (duplicate edges, inconsistent input).
   */
  CgStatus_Graph = 5,
  /**
   * Weighting failed (total overrides smaller than observed counts).
   */
  CgStatus_Weight = 6,
  /**
   * Similarity query failed (unknown query, bad walk parameters).
   */
  CgStatus_Similarity = 7,
  /**
   * Index or key lookup out of range.
   */
  CgStatus_OutOfRange = 8,
  /**
   * A panic was caught at the boundary; state may be inconsistent.
   */
  CgStatus_Internal = 9,
} CgStatus;

/**
 * Opaque similarity engine: one graph weighted under one model, with
 * its transition matrices precomputed.
 */
typedef struct CgEngine CgEngine;

/**
 * Opaque bipartite click graph.
 */
typedef struct CgGraph CgGraph;

/**
 * Opaque ranked list of (query, score) results.
 */
typedef struct CgSimilarList CgSimilarList;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cg_version(void);

/**
 * Message for the most recent failure on the calling thread. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *cg_last_error(void);

/**
 * Build a graph from an edge file of `query \t url \t uf` lines
 * (`#` comments allowed). On success `*out` owns the new graph.
 */
enum CgStatus cg_graph_from_edge_file(const char *path, struct CgGraph **out);

/**
 * Build a graph from edge data held in memory: a NUL-terminated string
 * with the same format as an edge file.
 */
enum CgStatus cg_graph_from_edge_data(const char *data, struct CgGraph **out);

/**
 * Destroy a graph. Null is a no-op.
 */
void cg_graph_free(struct CgGraph *g);

/**
 * Number of distinct queries; 0 if `g` is null.
 */
uint64_t cg_graph_query_count(const struct CgGraph *g);

/**
 * Number of distinct URLs; 0 if `g` is null.
 */
uint64_t cg_graph_url_count(const struct CgGraph *g);

/**
 * Number of edges; 0 if `g` is null.
 */
uint64_t cg_graph_edge_count(const struct CgGraph *g);

/**
 * Sum of user frequencies over all edges; 0 if `g` is null.
 */
uint64_t cg_graph_total_uf(const struct CgGraph *g);

/**
 * Weight a graph under `model` and precompute its transition matrices.
 * `q_total` / `u_total` of 0 mean "use the graph's own counts"; larger
 * corpus totals can be passed when the graph is a filtered slice.
 * The graph handle stays owned by the caller and may be freed once
 * this returns; the engine keeps its own reference.
 */
enum CgStatus cg_engine_new(const struct CgGraph *g,
                            enum CgModel model,
                            uint64_t q_total,
                            uint64_t u_total,
                            struct CgEngine **out);

/**
 * Destroy an engine. Null is a no-op.
 */
void cg_engine_free(struct CgEngine *e);

/**
 * Weighted value of the edge (`query`, `url`), or `OutOfRange` when
 * either name is unknown or the edge is absent.
 */
enum CgStatus cg_engine_edge_weight(const struct CgEngine *e,
                                    const char *query,
                                    const char *url,
                                    double *out);

/**
 * Top-`k` queries most similar to `query`. `alpha` and `steps` are
 * only read for `CgMethod_Ppr`. On success `*out` owns a ranked list;
 * it may be empty when the source shares no URL with other queries.
 */
enum CgStatus cg_engine_similar(const struct CgEngine *e,
                                const char *query,
                                enum CgMethod method,
                                double alpha,
                                uint32_t steps,
                                uintptr_t k,
                                struct CgSimilarList **out);

/**
 * Number of entries in a result list; 0 if `list` is null.
 */
uintptr_t cg_similar_len(const struct CgSimilarList *list);

/**
 * Query text at `index`, or null when out of range. The pointer stays
 * valid until the list is freed.
 */
const char *cg_similar_query(const struct CgSimilarList *list, uintptr_t index);

/**
 * Score at `index`, or NaN when out of range.
 */
double cg_similar_score(const struct CgSimilarList *list, uintptr_t index);

/**
 * Destroy a result list. Null is a no-op.
 */
void cg_similar_free(struct CgSimilarList *list);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLICKGRAPH_H */
