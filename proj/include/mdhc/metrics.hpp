#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mdhc/errors.hpp"

namespace mdhc {

/// Cross-tabulation of two labelings (rows: truth, cols: prediction).
struct ContingencyTable {
    std::vector<std::vector<std::int64_t>> counts;
    std::int64_t n = 0;

    static ContingencyTable build(const std::vector<int>& truth,
                                  const std::vector<int>& pred);
    std::vector<std::int64_t> row_sums() const;
    std::vector<std::int64_t> col_sums() const;
};

/// Normalized mutual information, geometric-mean normalization, natural logs.
/// Both entropies zero -> 1; exactly one zero -> 0.
double nmi(const std::vector<int>& truth, const std::vector<int>& pred);

/// Adjusted Rand index via the pair-counting formula.
double ari(const std::vector<int>& truth, const std::vector<int>& pred);

/// Per-dataset regret to the best method, rescaled to span [0,1];
/// all-equal scores yield all-zero regrets.
std::map<std::string, double> normalized_regret(const std::map<std::string, double>& scores);

} // namespace mdhc
