#include "mdhc/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace mdhc {

PrunedModel full_model(int depth, const std::vector<double>& ss) {
    int n = (1 << depth) - 1;
    if (static_cast<int>(ss.size()) < n + 1)
        throw InvalidArgumentError("full_model: ss must be 1-indexed with one entry per node");
    PrunedModel m;
    m.kept.assign(static_cast<std::size_t>(n) + 1, 1);
    m.kept[0] = 0;
    for (int id = (n + 1) / 2; id <= n; ++id) {
        m.leaves.push_back(id);
        m.total_ss += ss[static_cast<std::size_t>(id)];
    }
    return m;
}

namespace {

bool is_leaf_in(const PrunedModel& m, int id) {
    std::size_t child = static_cast<std::size_t>(2 * id);
    return child >= m.kept.size() || !m.kept[child];
}

} // namespace

std::pair<PrunedModel, int> prune_step(const PrunedModel& model,
                                       const std::vector<double>& ss) {
    if (model.leaves.size() < 2)
        throw InvalidArgumentError("prune_step: nothing to prune in a single-leaf model");
    int best = -1;
    double best_inc = std::numeric_limits<double>::infinity();
    int n = static_cast<int>(model.kept.size()) - 1;
    for (int j = 1; j <= n; ++j) {
        if (!model.kept[static_cast<std::size_t>(j)] || is_leaf_in(model, j)) continue;
        // pre-terminal: both children kept and themselves leaves
        if (!is_leaf_in(model, 2 * j) || !is_leaf_in(model, 2 * j + 1)) continue;
        double inc = ss[static_cast<std::size_t>(j)] -
                     (ss[static_cast<std::size_t>(2 * j)] + ss[static_cast<std::size_t>(2 * j + 1)]);
        if (inc < best_inc) {
            best_inc = inc;
            best = j;
        }
    }
    PrunedModel next = model;
    next.kept[static_cast<std::size_t>(2 * best)] = 0;
    next.kept[static_cast<std::size_t>(2 * best + 1)] = 0;
    next.leaves.clear();
    next.total_ss = 0.0;
    for (int id = 1; id <= n; ++id) {
        if (next.kept[static_cast<std::size_t>(id)] && is_leaf_in(next, id)) {
            next.leaves.push_back(id);
            next.total_ss += ss[static_cast<std::size_t>(id)];
        }
    }
    return {std::move(next), best};
}

PruneSequence prune_sequence(int depth, const std::vector<double>& ss) {
    PruneSequence seq;
    seq.models.push_back(full_model(depth, ss));
    while (seq.models.back().leaves.size() > 1) {
        auto [next, pruned] = prune_step(seq.models.back(), ss);
        seq.models.push_back(std::move(next));
        seq.pruned_nodes.push_back(pruned);
    }
    for (const auto& m : seq.models) seq.ss_curve.push_back(m.total_ss);
    return seq;
}

PruneSequence prune_sequence(const TreeModel& tree) {
    std::vector<double> ss(static_cast<std::size_t>(tree.node_count()) + 1, 0.0);
    auto raw = tree.node_ss();
    for (int id = 1; id <= tree.node_count(); ++id)
        ss[static_cast<std::size_t>(id)] = raw[static_cast<std::size_t>(id - 1)];
    return prune_sequence(tree.depth(), ss);
}

std::vector<double> ss_by_leaf_count(const PruneSequence& seq) {
    std::size_t max_leaves = seq.models.front().leaves.size();
    std::vector<double> out(max_leaves + 1, 0.0);
    for (const auto& m : seq.models) out[m.leaves.size()] = m.total_ss;
    return out;
}

double elbow_score(int K, int Kmax, const std::vector<double>& ss_of) {
    if (Kmax < 3 || K < 2 || K > Kmax - 1)
        throw InvalidArgumentError("elbow_score: need 2 <= K <= Kmax-1 and Kmax >= 3");
    if (static_cast<std::size_t>(Kmax) >= ss_of.size())
        throw InvalidArgumentError("elbow_score: ss_of not defined at Kmax");
    double s1 = ss_of[1], sk = ss_of[static_cast<std::size_t>(K)],
           sm = ss_of[static_cast<std::size_t>(Kmax)];
    double span = s1 - sm;
    if (span <= 0.0)
        throw InvalidArgumentError("elbow_score: degenerate flat curve, SS(1) == SS(Kmax)");
    double first;
    if (s1 - sk == 0.0)
        first = M_PI / 2.0; // ratio -> +inf
    else
        first = std::atan((static_cast<double>(K - 1) / (Kmax - 1)) * (span / (s1 - sk)));
    double second =
        std::atan((static_cast<double>(Kmax - 1) / (Kmax - K)) * ((sk - sm) / span));
    return first + second;
}

int elbow_pick(const std::vector<double>& ss_of, int Kmax) {
    int best = 2;
    double best_score = std::numeric_limits<double>::infinity();
    for (int K = 2; K <= Kmax - 1; ++K) {
        double s = elbow_score(K, Kmax, ss_of);
        if (s < best_score) { // strict: ties keep the smaller K
            best_score = s;
            best = K;
        }
    }
    return best;
}

int select_k(const std::vector<double>& ss_of, const std::vector<int>& kmax_range,
             bool* degenerate) {
    if (kmax_range.empty())
        throw ConfigError("select_k: empty Kmax range");
    int max_leaves = static_cast<int>(ss_of.size()) - 1;
    std::map<int, int> votes;
    bool any_degenerate = false;
    for (int Kmax : kmax_range) {
        if (Kmax < 3 || Kmax > max_leaves)
            throw ConfigError("select_k: Kmax " + std::to_string(Kmax) +
                              " outside [3, " + std::to_string(max_leaves) + "]");
        if (ss_of[1] - ss_of[static_cast<std::size_t>(Kmax)] <= 0.0) {
            any_degenerate = true;
            ++votes[1];
        } else {
            ++votes[elbow_pick(ss_of, Kmax)];
        }
    }
    if (degenerate) *degenerate = any_degenerate;
    int best_k = 0, best_votes = -1;
    for (const auto& [k, v] : votes) { // map order: smaller K wins ties
        if (v > best_votes) {
            best_votes = v;
            best_k = k;
        }
    }
    return best_k;
}

int select_k(const PruneSequence& seq, const std::vector<int>& kmax_range,
             bool* degenerate) {
    return select_k(ss_by_leaf_count(seq), kmax_range, degenerate);
}

const PrunedModel& cut_to_k(const PruneSequence& seq, int k) {
    int max_leaves = static_cast<int>(seq.models.front().leaves.size());
    if (k < 1 || k > max_leaves)
        throw InvalidArgumentError("cut_to_k: k " + std::to_string(k) +
                                   " outside [1, " + std::to_string(max_leaves) + "]");
    return seq.models[static_cast<std::size_t>(max_leaves - k)];
}

std::vector<int> default_kmax_range(int max_leaves) {
    std::vector<int> out;
    for (int k = 4; k <= max_leaves; ++k) out.push_back(k);
    return out;
}

} // namespace mdhc
