#include "mdhc/capi.h"

#include <cstring>
#include <string>
#include <vector>

#include "mdhc/errors.hpp"
#include "mdhc/gmm.hpp"
#include "mdhc/metrics.hpp"
#include "mdhc/selection.hpp"
#include "mdhc/tree.hpp"

namespace {

thread_local std::string g_last_error;

mdhc_status set_error(mdhc_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

mdhc_status status_from(const mdhc::Error& e) {
    const std::string& c = e.category();
    if (c == "invalid_argument") return MDHC_ERR_INVALID_ARGUMENT;
    if (c == "dimension_mismatch") return MDHC_ERR_DIMENSION;
    if (c == "config") return MDHC_ERR_CONFIG;
    if (c == "io") return MDHC_ERR_IO;
    if (c == "parse") return MDHC_ERR_PARSE;
    return MDHC_ERR_INTERNAL;
}

template <typename Fn>
mdhc_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return MDHC_OK;
    } catch (const mdhc::Error& e) {
        return set_error(status_from(e), e.what());
    } catch (const std::exception& e) {
        return set_error(MDHC_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(MDHC_ERR_INTERNAL, "unknown error");
    }
}

mdhc::LearnConfig to_cpp(const mdhc_config& c) {
    mdhc::LearnConfig cfg;
    cfg.C = c.C;
    cfg.alpha_factor = c.alpha_factor;
    cfg.q = c.q;
    cfg.r = c.r;
    cfg.gbar1_scale = c.gbar1_scale;
    cfg.gbar2 = c.gbar2;
    cfg.eta = c.eta;
    cfg.h_floor = c.h_floor;
    cfg.seed = c.seed;
    return cfg;
}

Eigen::Map<const Eigen::VectorXd> as_vec(const double* x, int dim) {
    return Eigen::Map<const Eigen::VectorXd>(x, dim);
}

} // namespace

struct mdhc_tree {
    mdhc::TreeModel model;
};

struct mdhc_selection {
    mdhc::PruneSequence seq;
};

struct mdhc_mixture {
    mdhc::GaussianMixture gmm;
};

extern "C" {

const char* mdhc_status_name(mdhc_status status) {
    switch (status) {
    case MDHC_OK: return "ok";
    case MDHC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case MDHC_ERR_DIMENSION: return "dimension_mismatch";
    case MDHC_ERR_CONFIG: return "config";
    case MDHC_ERR_IO: return "io";
    case MDHC_ERR_PARSE: return "parse";
    default: return "internal";
    }
}

const char* mdhc_last_error(void) { return g_last_error.c_str(); }

void mdhc_config_defaults(mdhc_config* cfg) {
    mdhc::LearnConfig d;
    cfg->C = d.C;
    cfg->alpha_factor = d.alpha_factor;
    cfg->q = d.q;
    cfg->r = d.r;
    cfg->gbar1_scale = d.gbar1_scale;
    cfg->gbar2 = d.gbar2;
    cfg->eta = d.eta;
    cfg->h_floor = d.h_floor;
    cfg->seed = d.seed;
}

mdhc_status mdhc_config_validate(const mdhc_config* cfg) {
    return guarded([&] { to_cpp(*cfg).validate(); });
}

mdhc_status mdhc_tree_create(int depth, int dim, const mdhc_config* cfg,
                             mdhc_tree** out) {
    return guarded([&] { *out = new mdhc_tree{mdhc::TreeModel(depth, dim, to_cpp(*cfg))}; });
}

void mdhc_tree_free(mdhc_tree* tree) { delete tree; }

int mdhc_tree_depth(const mdhc_tree* t) { return t->model.depth(); }
int mdhc_tree_dim(const mdhc_tree* t) { return t->model.dim(); }
int mdhc_tree_node_count(const mdhc_tree* t) { return t->model.node_count(); }
int mdhc_tree_leaf_count(const mdhc_tree* t) { return t->model.leaf_count(); }
uint64_t mdhc_tree_total_count(const mdhc_tree* t) { return t->model.total_count(); }

mdhc_status mdhc_tree_observe(mdhc_tree* tree, const double* x, int dim,
                              int* leaf_out) {
    return guarded([&] {
        int leaf = tree->model.observe(as_vec(x, dim));
        if (leaf_out) *leaf_out = leaf;
    });
}

mdhc_status mdhc_tree_assign(const mdhc_tree* tree, const double* x, int dim,
                             int* leaf_out) {
    return guarded([&] { *leaf_out = tree->model.assign(as_vec(x, dim)); });
}

mdhc_status mdhc_tree_cluster(const mdhc_tree* tree, const double* x, int dim,
                              int* cluster_out) {
    return guarded([&] {
        *cluster_out = tree->model.cluster_of_leaf(tree->model.assign(as_vec(x, dim)));
    });
}

mdhc_status mdhc_tree_node_ss(const mdhc_tree* tree, double* ss_out) {
    return guarded([&] {
        auto ss = tree->model.node_ss();
        std::memcpy(ss_out, ss.data(), ss.size() * sizeof(double));
    });
}

mdhc_status mdhc_tree_node_hyperplane(const mdhc_tree* tree, int id, double* v_out,
                                      double* b_out) {
    return guarded([&] {
        if (id < 1 || id > tree->model.node_count())
            throw mdhc::InvalidArgumentError("node id out of range");
        const auto& n = tree->model.node(id);
        Eigen::Map<Eigen::VectorXd>(v_out, n.hyperplane.v.size()) = n.hyperplane.v;
        *b_out = n.hyperplane.b;
    });
}

mdhc_status mdhc_tree_node_mean(const mdhc_tree* tree, int id, double* mean_out) {
    return guarded([&] {
        if (id < 1 || id > tree->model.node_count())
            throw mdhc::InvalidArgumentError("node id out of range");
        const auto& m = tree->model.node(id).mean.mean();
        Eigen::Map<Eigen::VectorXd>(mean_out, m.size()) = m;
    });
}

mdhc_status mdhc_tree_node_stats(const mdhc_tree* tree, int id, uint64_t* count_out,
                                 double* sigma_hat_out) {
    return guarded([&] {
        if (id < 1 || id > tree->model.node_count())
            throw mdhc::InvalidArgumentError("node id out of range");
        const auto& n = tree->model.node(id);
        if (count_out) *count_out = n.count;
        if (sigma_hat_out) *sigma_hat_out = n.proj_moments.stddev();
    });
}

mdhc_status mdhc_tree_set_selection(mdhc_tree* tree, int k, const int* leaves) {
    return guarded([&] {
        mdhc::Selection sel;
        sel.k = k;
        sel.leaves.assign(leaves, leaves + k);
        tree->model.set_selection(std::move(sel));
    });
}

int mdhc_tree_selected_k(const mdhc_tree* tree) {
    const auto* sel = tree->model.selection();
    return sel ? sel->k : 0;
}

mdhc_status mdhc_tree_selected_leaves(const mdhc_tree* tree, int* leaves_out) {
    return guarded([&] {
        const auto* sel = tree->model.selection();
        if (!sel) throw mdhc::InvalidArgumentError("no selection attached");
        std::memcpy(leaves_out, sel->leaves.data(), sel->leaves.size() * sizeof(int));
    });
}

mdhc_status mdhc_tree_save(const mdhc_tree* tree, const char* path) {
    return guarded([&] { tree->model.save(std::string(path)); });
}

mdhc_status mdhc_tree_load(const char* path, mdhc_tree** out) {
    return guarded([&] { *out = new mdhc_tree{mdhc::TreeModel::load(std::string(path))}; });
}

mdhc_status mdhc_selection_create(const mdhc_tree* tree, mdhc_selection** out) {
    return guarded([&] { *out = new mdhc_selection{mdhc::prune_sequence(tree->model)}; });
}

void mdhc_selection_free(mdhc_selection* sel) { delete sel; }

int mdhc_selection_max_leaves(const mdhc_selection* sel) {
    return static_cast<int>(sel->seq.models.front().leaves.size());
}

mdhc_status mdhc_selection_ss_curve(const mdhc_selection* sel, double* out) {
    return guarded([&] {
        auto curve = mdhc::ss_by_leaf_count(sel->seq);
        for (std::size_t k = 1; k < curve.size(); ++k) out[k - 1] = curve[k];
    });
}

mdhc_status mdhc_selection_pick(const mdhc_selection* sel, int kmax, int* k_out) {
    return guarded([&] {
        *k_out = mdhc::select_k(mdhc::ss_by_leaf_count(sel->seq), {kmax});
    });
}

mdhc_status mdhc_selection_vote(const mdhc_selection* sel, const int* kmaxs,
                                int n_kmax, int* k_out, int* degenerate_out) {
    return guarded([&] {
        std::vector<int> range(kmaxs, kmaxs + n_kmax);
        bool degenerate = false;
        *k_out = mdhc::select_k(sel->seq, range, &degenerate);
        if (degenerate_out) *degenerate_out = degenerate ? 1 : 0;
    });
}

mdhc_status mdhc_selection_leaves(const mdhc_selection* sel, int k,
                                  int* leaves_out) {
    return guarded([&] {
        const auto& m = mdhc::cut_to_k(sel->seq, k);
        std::memcpy(leaves_out, m.leaves.data(), m.leaves.size() * sizeof(int));
    });
}

mdhc_status mdhc_mixture_load(const char* path, mdhc_mixture** out) {
    return guarded([&] {
        *out = new mdhc_mixture{mdhc::GaussianMixture::load(std::string(path))};
    });
}

void mdhc_mixture_free(mdhc_mixture* mix) { delete mix; }

int mdhc_mixture_dim(const mdhc_mixture* mix) {
    return static_cast<int>(mix->gmm.dim());
}

int mdhc_mixture_components(const mdhc_mixture* mix) {
    return mix->gmm.components();
}

mdhc_status mdhc_mixture_sample(const mdhc_mixture* mix, int64_t n, uint64_t seed,
                                double* x_out, int* labels_out) {
    return guarded([&] {
        std::vector<int> labels;
        Eigen::MatrixXd data = mix->gmm.sample(n, seed, labels_out ? &labels : nullptr);
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            x_out, data.rows(), data.cols()) = data;
        if (labels_out)
            std::memcpy(labels_out, labels.data(), labels.size() * sizeof(int));
    });
}

mdhc_status mdhc_mixture_proj_density(const mdhc_mixture* mix, const double* v,
                                      int dim, double b, double* out) {
    return guarded([&] { *out = mix->gmm.proj_density(as_vec(v, dim), b); });
}

mdhc_status mdhc_mixture_objective(const mdhc_mixture* mix, const double* v, int dim,
                                   double b, double C, double alpha, double* out) {
    return guarded([&] { *out = mix->gmm.objective(as_vec(v, dim), b, C, alpha); });
}

mdhc_status mdhc_mixture_residual(const mdhc_mixture* mix, const double* v, int dim,
                                  double b, double C, double alpha,
                                  double* grad_v_tangent_out, double* grad_b_out) {
    return guarded([&] {
        mdhc::Hyperplane hp{as_vec(v, dim), b};
        auto res = mix->gmm.stationarity_residual(hp, C, alpha);
        if (grad_v_tangent_out) *grad_v_tangent_out = res.grad_v_tangent_norm;
        if (grad_b_out) *grad_b_out = res.grad_b_abs;
    });
}

mdhc_status mdhc_mixture_gradient_bias(const mdhc_mixture* mix, const double* v,
                                       int dim, double b, double h, int64_t n,
                                       uint64_t seed, double* bias_out) {
    return guarded([&] {
        if (n < 1) throw mdhc::InvalidArgumentError("gradient_bias: n must be >= 1");
        if (h <= 0) throw mdhc::InvalidArgumentError("gradient_bias: h must be > 0");
        mdhc::Hyperplane hp{as_vec(v, dim), b};
        Eigen::MatrixXd data = mix->gmm.sample(n, seed);
        Eigen::VectorXd mean_u = Eigen::VectorXd::Zero(dim);
        for (Eigen::Index i = 0; i < data.rows(); ++i) {
            auto g = mdhc::stochastic_gradient(hp, data.row(i).transpose(), h);
            mean_u += g.u;
        }
        mean_u /= static_cast<double>(n);
        *bias_out = (mean_u - mix->gmm.proj_density_grad_v(hp.v, hp.b)).norm();
    });
}

mdhc_status mdhc_nmi(const int* truth, const int* pred, int64_t n, double* out) {
    return guarded([&] {
        std::vector<int> t(truth, truth + n), p(pred, pred + n);
        *out = mdhc::nmi(t, p);
    });
}

mdhc_status mdhc_ari(const int* truth, const int* pred, int64_t n, double* out) {
    return guarded([&] {
        std::vector<int> t(truth, truth + n), p(pred, pred + n);
        *out = mdhc::ari(t, p);
    });
}

} // extern "C"
