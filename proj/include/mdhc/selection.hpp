#pragma once

#include <vector>

#include "mdhc/errors.hpp"
#include "mdhc/tree.hpp"

namespace mdhc {

/// A valid pruning of the complete tree: kept node set closed under the
/// parent relation, with both children kept for every kept internal node.
struct PrunedModel {
    std::vector<char> kept;  // index by node id, entry 0 unused
    std::vector<int> leaves; // ascending node ids
    double total_ss = 0.0;   // sum of SS over leaves
};

/// The greedy pruning trajectory from the full model down to the root-only
/// model. models[i] has max_leaves - i leaves; ss_curve is aligned.
struct PruneSequence {
    std::vector<PrunedModel> models;
    std::vector<double> ss_curve;
    std::vector<int> pruned_nodes; // pre-terminal node collapsed at each step
};

/// The unpruned model over a depth-D tree; ss is 1-indexed by node id.
PrunedModel full_model(int depth, const std::vector<double>& ss);

/// Collapses the pre-terminal node with the least SS increase
/// SS(j) - (SS(2j) + SS(2j+1)); ties break to the smallest id.
/// Returns the new model and the collapsed node id.
std::pair<PrunedModel, int> prune_step(const PrunedModel& model,
                                       const std::vector<double>& ss);

PruneSequence prune_sequence(int depth, const std::vector<double>& ss);
PruneSequence prune_sequence(const TreeModel& tree);

/// Total SS per leaf count: entry K (1-indexed) is the total SS of the
/// K-leaf model in the sequence. Entry 0 is unused.
std::vector<double> ss_by_leaf_count(const PruneSequence& seq);

/// Two-arctan elbow score at K on the curve ss_of (1-indexed by leaf count).
/// A zero SS(1)-SS(K) denominator contributes pi/2 for the first term.
double elbow_score(int K, int Kmax, const std::vector<double>& ss_of);

/// Elbow argmin per Kmax followed by a majority vote across kmax_range;
/// all ties break toward smaller K. A fully flat curve selects K=1 and sets
/// *degenerate when provided.
int select_k(const std::vector<double>& ss_of, const std::vector<int>& kmax_range,
             bool* degenerate = nullptr);
int select_k(const PruneSequence& seq, const std::vector<int>& kmax_range,
             bool* degenerate = nullptr);

/// Per-Kmax elbow pick (argmin over K in 2..Kmax-1).
int elbow_pick(const std::vector<double>& ss_of, int Kmax);

const PrunedModel& cut_to_k(const PruneSequence& seq, int k);

/// Default voting range [4, max_leaves], empty when max_leaves < 4.
std::vector<int> default_kmax_range(int max_leaves);

} // namespace mdhc
