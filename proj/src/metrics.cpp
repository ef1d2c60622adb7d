#include "mdhc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace mdhc {

namespace {

std::vector<int> compress_labels(const std::vector<int>& labels) {
    std::unordered_map<int, int> index;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = index.emplace(labels[i], static_cast<int>(index.size()));
        out[i] = it->second;
    }
    return out;
}

double entropy(const std::vector<std::int64_t>& sums, double n) {
    double h = 0.0;
    for (std::int64_t s : sums) {
        if (s == 0) continue;
        double p = static_cast<double>(s) / n;
        h -= p * std::log(p);
    }
    return h;
}

double choose2(double m) { return m * (m - 1.0) / 2.0; }

} // namespace

ContingencyTable ContingencyTable::build(const std::vector<int>& truth,
                                         const std::vector<int>& pred) {
    if (truth.size() != pred.size())
        throw InvalidArgumentError("labelings have different lengths");
    if (truth.empty()) throw InvalidArgumentError("labelings are empty");
    auto t = compress_labels(truth);
    auto p = compress_labels(pred);
    int rows = *std::max_element(t.begin(), t.end()) + 1;
    int cols = *std::max_element(p.begin(), p.end()) + 1;
    ContingencyTable table;
    table.counts.assign(static_cast<std::size_t>(rows),
                        std::vector<std::int64_t>(static_cast<std::size_t>(cols), 0));
    table.n = static_cast<std::int64_t>(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        ++table.counts[static_cast<std::size_t>(t[i])][static_cast<std::size_t>(p[i])];
    return table;
}

std::vector<std::int64_t> ContingencyTable::row_sums() const {
    std::vector<std::int64_t> out(counts.size(), 0);
    for (std::size_t i = 0; i < counts.size(); ++i)
        for (std::int64_t c : counts[i]) out[i] += c;
    return out;
}

std::vector<std::int64_t> ContingencyTable::col_sums() const {
    std::vector<std::int64_t> out(counts.empty() ? 0 : counts[0].size(), 0);
    for (const auto& row : counts)
        for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j];
    return out;
}

double nmi(const std::vector<int>& truth, const std::vector<int>& pred) {
    auto table = ContingencyTable::build(truth, pred);
    double n = static_cast<double>(table.n);
    auto rows = table.row_sums();
    auto cols = table.col_sums();
    double ht = entropy(rows, n);
    double hp = entropy(cols, n);
    if (ht == 0.0 && hp == 0.0) return 1.0;
    if (ht == 0.0 || hp == 0.0) return 0.0;
    double mi = 0.0;
    for (std::size_t i = 0; i < table.counts.size(); ++i) {
        for (std::size_t j = 0; j < table.counts[i].size(); ++j) {
            std::int64_t c = table.counts[i][j];
            if (c == 0) continue;
            double pij = static_cast<double>(c) / n;
            mi += pij * std::log(pij * n * n /
                                 (static_cast<double>(rows[i]) * static_cast<double>(cols[j])));
        }
    }
    return mi / std::sqrt(ht * hp);
}

double ari(const std::vector<int>& truth, const std::vector<int>& pred) {
    auto table = ContingencyTable::build(truth, pred);
    double n = static_cast<double>(table.n);
    double sum_ij = 0.0;
    for (const auto& row : table.counts)
        for (std::int64_t c : row) sum_ij += choose2(static_cast<double>(c));
    double sum_a = 0.0, sum_b = 0.0;
    for (std::int64_t a : table.row_sums()) sum_a += choose2(static_cast<double>(a));
    for (std::int64_t b : table.col_sums()) sum_b += choose2(static_cast<double>(b));
    double expected = sum_a * sum_b / choose2(n);
    double maximum = 0.5 * (sum_a + sum_b);
    double denom = maximum - expected;
    if (denom == 0.0) {
        // both partitions trivial (all-singletons or all-one-cluster)
        return sum_ij == sum_a && sum_ij == sum_b ? 1.0 : 0.0;
    }
    return (sum_ij - expected) / denom;
}

std::map<std::string, double> normalized_regret(
    const std::map<std::string, double>& scores) {
    if (scores.size() < 2)
        throw InvalidArgumentError("normalized_regret: need at least 2 methods");
    double best = -std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& [name, s] : scores) {
        best = std::max(best, s);
        worst = std::min(worst, s);
    }
    std::map<std::string, double> out;
    double span = best - worst;
    for (const auto& [name, s] : scores)
        out[name] = span == 0.0 ? 0.0 : (best - s) / span;
    return out;
}

} // namespace mdhc
