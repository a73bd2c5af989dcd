#ifndef BETHE_H
#define BETHE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BetheStatus {
  BETHE_STATUS_OK = 0,
  BETHE_STATUS_NULL_POINTER = 1,
  // Malformed graph, labels or parameters.
  BETHE_STATUS_INVALID_INPUT = 2,
  // The numerical pipeline failed to converge or produce a usable result.
  BETHE_STATUS_ALGORITHM_FAILURE = 3,
  // Output buffer shorter than required.
  BETHE_STATUS_BUFFER_TOO_SMALL = 4,
  BETHE_STATUS_PANIC = 5,
} BetheStatus;

// Opaque clustering result handle.
typedef struct BetheClustering BetheClustering;

// Opaque graph handle.
typedef struct BetheGraph BetheGraph;

typedef struct BetheClusterOptions {
  // Number of classes; 0 to estimate it.
  size_t k;
  bool row_norm;
  uint64_t seed;
  // Eigensolver tolerance.
  double tol;
  size_t restarts;
  size_t iters;
} BetheClusterOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or NULL. The pointer stays
// valid until the next failing call on the same thread.
const char *bethe_last_error(void);

// Builds a graph from `m` undirected edges `(src[i], dst[i])`.
//
// `n = 0` infers the node count. With `lenient` set, self-loops and
// duplicates are dropped instead of rejected.
//
// # Safety
// `src` and `dst` must point to `m` readable values and `out` must be writable.
enum BetheStatus bethe_graph_from_edges(const size_t *src,
                                        const size_t *dst,
                                        size_t m,
                                        size_t n,
                                        bool lenient,
                                        struct BetheGraph **out);

// # Safety
// `g` must be NULL or a handle from [`bethe_graph_from_edges`] not yet freed.
void bethe_graph_free(struct BetheGraph *g);

// # Safety
// `g` must be NULL or a live graph handle.
size_t bethe_graph_node_count(const struct BetheGraph *g);

// # Safety
// `g` must be NULL or a live graph handle.
size_t bethe_graph_edge_count(const struct BetheGraph *g);

struct BetheClusterOptions bethe_cluster_options_default(void);

// Clusters the giant component of `g`. `opts` may be NULL for defaults.
//
// # Safety
// `g` must be a live graph handle, `opts` NULL or readable, `out` writable.
enum BetheStatus bethe_cluster(const struct BetheGraph *g,
                               const struct BetheClusterOptions *opts,
                               struct BetheClustering **out);

// # Safety
// `c` must be NULL or a handle from [`bethe_cluster`] not yet freed.
void bethe_clustering_free(struct BetheClustering *c);

// Number of classes used, or 0 for NULL.
//
// # Safety
// `c` must be NULL or a live clustering handle.
size_t bethe_clustering_k(const struct BetheClustering *c);

// Nodes outside the giant component, or 0 for NULL.
//
// # Safety
// `c` must be NULL or a live clustering handle.
size_t bethe_clustering_unassigned_count(const struct BetheClustering *c);

// Copies one label per input node into `labels`, which must hold the node
// count. Unassigned nodes get label 0.
//
// # Safety
// `c` must be a live clustering handle and `labels` writable for `len` values.
enum BetheStatus bethe_clustering_labels(const struct BetheClustering *c,
                                         size_t *labels,
                                         size_t len);

// Copies `ζ_1..ζ_k` into `zeta`, which must hold `k` values.
//
// # Safety
// `c` must be a live clustering handle and `zeta` writable for `len` values.
enum BetheStatus bethe_clustering_zeta(const struct BetheClustering *c, double *zeta, size_t len);

// # Safety
// `g` must be a live graph handle, `labels` readable for `len` values and
// `out` writable.
enum BetheStatus bethe_modularity(const struct BetheGraph *g,
                                  const size_t *labels,
                                  size_t len,
                                  double *out);

// Normalized negative log-likelihood of the fitted degree-corrected block model.
//
// # Safety
// As for [`bethe_modularity`].
enum BetheStatus bethe_log_likelihood(const struct BetheGraph *g,
                                      const size_t *labels,
                                      size_t len,
                                      double *out);

// Overlap between two labelings with labels in `0..k`.
//
// # Safety
// `hat` and `truth` must be readable for `len` values and `out` writable.
enum BetheStatus bethe_overlap(const size_t *hat,
                               const size_t *truth,
                               size_t len,
                               size_t k,
                               double *out);

// Spectral radius of the non-backtracking matrix.
//
// # Safety
// `g` must be a live graph handle and `out` writable.
enum BetheStatus bethe_spectral_radius(const struct BetheGraph *g, double tol, double *out);

// Estimated number of classes.
//
// # Safety
// `g` must be a live graph handle and `out` writable.
enum BetheStatus bethe_estimate_k(const struct BetheGraph *g, double tol, size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BETHE_H */
