#ifndef FLOWSUM_H
#define FLOWSUM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by all functions.
typedef enum FlowsumStatus {
  FLOWSUM_STATUS_OK = 0,
  FLOWSUM_STATUS_NULL_POINTER = 1,
  FLOWSUM_STATUS_INVALID_UTF8 = 2,
  FLOWSUM_STATUS_IO = 3,
  FLOWSUM_STATUS_PARSE = 4,
  FLOWSUM_STATUS_INVALID_ARGUMENT = 5,
  FLOWSUM_STATUS_UNKNOWN_NODE = 6,
  FLOWSUM_STATUS_NUMERIC = 7,
  FLOWSUM_STATUS_OUT_OF_RANGE = 8,
  FLOWSUM_STATUS_INTERNAL = 9,
  FLOWSUM_STATUS_PANIC = 10,
} FlowsumStatus;

// Opaque directed influence graph.
typedef struct FlowsumGraph FlowsumGraph;

// Opaque summary document.
typedef struct FlowsumSummary FlowsumSummary;

// One retained flow between two clusters.
typedef struct FlowsumFlow {
  size_t src;
  size_t dst;
  double raw_sum;
  double rate;
  double normalized_rate;
} FlowsumFlow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *flowsum_last_error(void);

// Library version as a static NUL-terminated string.
const char *flowsum_version(void);

// Loads a graph from an edge TSV file and an optional metadata JSONL file
// (`meta_path` may be null).
//
// # Safety
// Path arguments must be null or NUL-terminated strings; `out` must be a
// valid pointer.
enum FlowsumStatus flowsum_graph_load(const char *edges_path,
                                      const char *meta_path,
                                      struct FlowsumGraph **out);

// Builds a graph over nodes `0..node_count` (ids are their decimal
// indices) from parallel edge arrays. `weights` may be null for unit
// weights.
//
// # Safety
// `src` and `dst` (and `weights` when non-null) must point to
// `edge_count` elements; `out` must be a valid pointer.
enum FlowsumStatus flowsum_graph_from_edges(size_t node_count,
                                            const size_t *src,
                                            const size_t *dst,
                                            const double *weights,
                                            size_t edge_count,
                                            struct FlowsumGraph **out);

// # Safety
// `graph` must be null or a handle from this library not yet freed.
void flowsum_graph_free(struct FlowsumGraph *graph);

// Node count, or 0 for a null handle.
//
// # Safety
// `graph` must be null or a live handle.
size_t flowsum_graph_node_count(const struct FlowsumGraph *graph);

// Edge count, or 0 for a null handle.
//
// # Safety
// `graph` must be null or a live handle.
size_t flowsum_graph_edge_count(const struct FlowsumGraph *graph);

// Summarizes the graph reachable from `source`, or the whole graph with
// node 0 as source when `source` is null. `config_json` is a JSON object
// of configuration fields (null for defaults); `l` follows `2k` when
// omitted.
//
// # Safety
// `graph` must be a live handle, string arguments null or NUL-terminated,
// and `out` a valid pointer.
enum FlowsumStatus flowsum_summarize(const struct FlowsumGraph *graph,
                                     const char *source,
                                     const char *config_json,
                                     struct FlowsumSummary **out);

// # Safety
// `summary` must be null or a handle from this library not yet freed.
void flowsum_summary_free(struct FlowsumSummary *summary);

// # Safety
// `summary` must be null or a live handle.
size_t flowsum_summary_cluster_count(const struct FlowsumSummary *summary);

// Size of cluster `cluster`, or 0 when out of range.
//
// # Safety
// `summary` must be null or a live handle.
size_t flowsum_summary_cluster_size(const struct FlowsumSummary *summary, size_t cluster);

// Cluster holding the source node.
//
// # Safety
// `summary` must be null or a live handle.
size_t flowsum_summary_source_cluster(const struct FlowsumSummary *summary);

// # Safety
// `summary` must be null or a live handle.
size_t flowsum_summary_flow_count(const struct FlowsumSummary *summary);

// Copies flow `index` into `out`.
//
// # Safety
// `summary` must be a live handle and `out` a valid pointer.
enum FlowsumStatus flowsum_summary_flow(const struct FlowsumSummary *summary,
                                        size_t index,
                                        struct FlowsumFlow *out);

// Serializes the summary as pretty JSON into a new string that must be
// released with [`flowsum_string_free`].
//
// # Safety
// `summary` must be a live handle and `out` a valid pointer.
enum FlowsumStatus flowsum_summary_to_json(const struct FlowsumSummary *summary, char **out);

// # Safety
// `s` must be null or a string returned by this library not yet freed.
void flowsum_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLOWSUM_H */
