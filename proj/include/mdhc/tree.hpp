#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mdhc/errors.hpp"
#include "mdhc/optimizer.hpp"
#include "mdhc/streaming_stats.hpp"

namespace mdhc {

/// Per-node state: separating hyperplane plus the incremental statistics
/// (count, mean, projected moments, within-node sum of squares).
struct NodeState {
    NodeState(Eigen::Index dim, std::uint64_t init_seed)
        : hyperplane{random_unit_vector(dim, init_seed), 0.0}, mean(dim), ss_acc(dim) {}

    Hyperplane hyperplane;
    std::uint64_t count = 0;
    MeanAccumulator mean;
    ScalarMoments proj_moments;
    SumSquaresAccumulator ss_acc;
    std::uint64_t degenerate_steps = 0;
};

/// Cluster selection attached to a fitted model: the pruned-model leaf set.
struct Selection {
    int k = 0;
    std::vector<int> leaves;
};

/// Complete bisecting tree of depth D: 2^D - 1 nodes with 1-based heap
/// indexing, children of node i at 2i and 2i+1. Observations are routed
/// root-to-leaf, updating every node on the path.
class TreeModel {
public:
    TreeModel(int depth, int dim, const LearnConfig& cfg);

    int depth() const noexcept { return depth_; }
    int dim() const noexcept { return dim_; }
    int node_count() const noexcept { return (1 << depth_) - 1; }
    int leaf_count() const noexcept { return 1 << (depth_ - 1); }
    std::uint64_t total_count() const noexcept { return total_count_; }
    const LearnConfig& config() const noexcept { return cfg_; }

    bool is_internal(int id) const noexcept { return 2 * id + 1 <= node_count(); }
    const NodeState& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }

    /// Route-and-update pass for one observation; returns the leaf reached.
    /// Optionally records the full root-to-leaf node path.
    int observe(const Eigen::Ref<const Eigen::VectorXd>& x,
                std::vector<int>* path = nullptr);

    /// Pure routing with frozen parameters; returns the leaf reached.
    int assign(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    /// Maps a full-depth leaf to its selection cluster label (0..k-1, ascending
    /// leaf-id order). Requires a selection to be attached.
    int cluster_of_leaf(int leaf_id) const;

    /// SS(id) per node; entry id-1 holds node id.
    std::vector<double> node_ss() const;

    const Selection* selection() const noexcept {
        return selection_.k > 0 ? &selection_ : nullptr;
    }
    void set_selection(Selection sel);

    void save(const std::string& path) const;
    void save(std::ostream& out) const;
    static TreeModel load(const std::string& path);
    static TreeModel load(std::istream& in);

private:
    int route_child(const NodeState& n, const Eigen::Ref<const Eigen::VectorXd>& x,
                    int id) const;
    void check_dim(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    int depth_;
    int dim_;
    LearnConfig cfg_;
    std::vector<NodeState> nodes_; // index 0 unused
    std::uint64_t total_count_ = 0;
    Selection selection_;
};

} // namespace mdhc
