/* C API for the streaming minimum-density-hyperplane clustering library.
 *
 * All functions return mdhc_status; MDHC_OK is 0. On failure a thread-local
 * message is available via mdhc_last_error(). Handles are opaque and must be
 * released with the matching *_free function.
 */
#ifndef MDHC_CAPI_H
#define MDHC_CAPI_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdhc_status {
    MDHC_OK = 0,
    MDHC_ERR_INVALID_ARGUMENT = 1,
    MDHC_ERR_DIMENSION = 2,
    MDHC_ERR_CONFIG = 3,
    MDHC_ERR_IO = 4,
    MDHC_ERR_PARSE = 5,
    MDHC_ERR_INTERNAL = 6
} mdhc_status;

/* Stable machine-parsable category name for a status code. */
const char* mdhc_status_name(mdhc_status status);

/* Message for the most recent failure on this thread; empty string if none. */
const char* mdhc_last_error(void);

/* ---- configuration ---- */

typedef struct mdhc_config {
    double C;
    double alpha_factor;
    double q;
    double r;
    double gbar1_scale;
    double gbar2;
    double eta;
    double h_floor;
    uint64_t seed;
} mdhc_config;

void mdhc_config_defaults(mdhc_config* cfg);

/* Checks the schedule-exponent admissibility constraints. */
mdhc_status mdhc_config_validate(const mdhc_config* cfg);

/* ---- tree model ---- */

typedef struct mdhc_tree mdhc_tree;

mdhc_status mdhc_tree_create(int depth, int dim, const mdhc_config* cfg,
                             mdhc_tree** out);
void mdhc_tree_free(mdhc_tree* tree);

int mdhc_tree_depth(const mdhc_tree* tree);
int mdhc_tree_dim(const mdhc_tree* tree);
int mdhc_tree_node_count(const mdhc_tree* tree);
int mdhc_tree_leaf_count(const mdhc_tree* tree);
uint64_t mdhc_tree_total_count(const mdhc_tree* tree);

/* Route-and-update pass for one observation; *leaf_out gets the leaf id. */
mdhc_status mdhc_tree_observe(mdhc_tree* tree, const double* x, int dim,
                              int* leaf_out);

/* Frozen routing; no state mutation. */
mdhc_status mdhc_tree_assign(const mdhc_tree* tree, const double* x, int dim,
                             int* leaf_out);

/* Cluster label 0..k-1 for one observation via the attached selection. */
mdhc_status mdhc_tree_cluster(const mdhc_tree* tree, const double* x, int dim,
                              int* cluster_out);

/* SS per node; ss_out must hold node_count entries, ss_out[id-1] = SS(id). */
mdhc_status mdhc_tree_node_ss(const mdhc_tree* tree, double* ss_out);

/* v_out must hold dim entries. */
mdhc_status mdhc_tree_node_hyperplane(const mdhc_tree* tree, int id, double* v_out,
                                      double* b_out);
mdhc_status mdhc_tree_node_mean(const mdhc_tree* tree, int id, double* mean_out);
mdhc_status mdhc_tree_node_stats(const mdhc_tree* tree, int id, uint64_t* count_out,
                                 double* sigma_hat_out);

/* Attaches the pruned-model leaf set used by mdhc_tree_cluster; persisted by
 * mdhc_tree_save. */
mdhc_status mdhc_tree_set_selection(mdhc_tree* tree, int k, const int* leaves);
int mdhc_tree_selected_k(const mdhc_tree* tree); /* 0 when none */
mdhc_status mdhc_tree_selected_leaves(const mdhc_tree* tree, int* leaves_out);

mdhc_status mdhc_tree_save(const mdhc_tree* tree, const char* path);
mdhc_status mdhc_tree_load(const char* path, mdhc_tree** out);

/* ---- pruning and cluster-count selection ---- */

typedef struct mdhc_selection mdhc_selection;

mdhc_status mdhc_selection_create(const mdhc_tree* tree, mdhc_selection** out);
void mdhc_selection_free(mdhc_selection* sel);

int mdhc_selection_max_leaves(const mdhc_selection* sel);

/* Total SS per leaf count; out must hold max_leaves entries, out[K-1] is the
 * K-leaf model's total SS. */
mdhc_status mdhc_selection_ss_curve(const mdhc_selection* sel, double* out);

/* Elbow argmin for one Kmax. */
mdhc_status mdhc_selection_pick(const mdhc_selection* sel, int kmax, int* k_out);

/* Majority vote over a Kmax range; degenerate_out (optional) is set to 1 when
 * a flat curve forced the K=1 fallback for some Kmax. */
mdhc_status mdhc_selection_vote(const mdhc_selection* sel, const int* kmaxs,
                                int n_kmax, int* k_out, int* degenerate_out);

/* Leaf ids of the k-leaf model; leaves_out must hold k entries. */
mdhc_status mdhc_selection_leaves(const mdhc_selection* sel, int k,
                                  int* leaves_out);

/* ---- Gaussian mixture ground truth ---- */

typedef struct mdhc_mixture mdhc_mixture;

mdhc_status mdhc_mixture_load(const char* path, mdhc_mixture** out);
void mdhc_mixture_free(mdhc_mixture* mix);

int mdhc_mixture_dim(const mdhc_mixture* mix);
int mdhc_mixture_components(const mdhc_mixture* mix);

/* x_out must hold n*dim entries (row-major); labels_out (optional) n entries. */
mdhc_status mdhc_mixture_sample(const mdhc_mixture* mix, int64_t n, uint64_t seed,
                                double* x_out, int* labels_out);

mdhc_status mdhc_mixture_proj_density(const mdhc_mixture* mix, const double* v,
                                      int dim, double b, double* out);
mdhc_status mdhc_mixture_objective(const mdhc_mixture* mix, const double* v,
                                   int dim, double b, double C, double alpha,
                                   double* out);

/* Stationarity residual of the hyperplane {x : v.x = b} against the exact
 * mixture. */
mdhc_status mdhc_mixture_residual(const mdhc_mixture* mix, const double* v,
                                  int dim, double b, double C, double alpha,
                                  double* grad_v_tangent_out, double* grad_b_out);

/* Norm of the Monte Carlo gradient-bias at (v, b) with bandwidth h: the mean
 * stochastic gradient over n fresh draws minus the analytic gradient. */
mdhc_status mdhc_mixture_gradient_bias(const mdhc_mixture* mix, const double* v,
                                       int dim, double b, double h, int64_t n,
                                       uint64_t seed, double* bias_out);

/* ---- external cluster-validity metrics ---- */

mdhc_status mdhc_nmi(const int* truth, const int* pred, int64_t n, double* out);
mdhc_status mdhc_ari(const int* truth, const int* pred, int64_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* MDHC_CAPI_H */
