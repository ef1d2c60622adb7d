#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "mdhc/metrics.hpp"

using namespace mdhc;

namespace {

// entropy/pair-counting brute force, independent of the implementation
double oracle_nmi(const std::vector<int>& truth, const std::vector<int>& pred) {
    double n = static_cast<double>(truth.size());
    auto ent = [n](const std::vector<int>& labels) {
        std::map<int, int> c;
        for (int l : labels) ++c[l];
        double h = 0;
        for (auto& [k, v] : c) h -= (v / n) * std::log(v / n);
        return h;
    };
    std::map<std::pair<int, int>, int> joint;
    for (std::size_t i = 0; i < truth.size(); ++i) ++joint[{truth[i], pred[i]}];
    std::map<int, int> ct, cp;
    for (int l : truth) ++ct[l];
    for (int l : pred) ++cp[l];
    double mi = 0;
    for (auto& [kp, v] : joint) {
        double pij = v / n, pi = ct[kp.first] / n, pj = cp[kp.second] / n;
        mi += pij * std::log(pij / (pi * pj));
    }
    double ht = ent(truth), hp = ent(pred);
    if (ht == 0 && hp == 0) return 1.0;
    if (ht == 0 || hp == 0) return 0.0;
    return mi / std::sqrt(ht * hp);
}

double oracle_ari(const std::vector<int>& truth, const std::vector<int>& pred) {
    // count agreements over all pairs
    double a = 0, b = 0, c = 0, d = 0;
    std::size_t n = truth.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            bool st = truth[i] == truth[j], sp = pred[i] == pred[j];
            if (st && sp) ++a;
            else if (st && !sp) ++b;
            else if (!st && sp) ++c;
            else ++d;
        }
    }
    double total = a + b + c + d;
    double expected = (a + b) * (a + c) / total;
    double maximum = 0.5 * ((a + b) + (a + c));
    if (maximum - expected == 0) return (b == 0 && c == 0) ? 1.0 : 0.0;
    return (a - expected) / (maximum - expected);
}

} // namespace

TEST_CASE("nmi worked examples") {
    CHECK(nmi({0, 0, 1, 1}, {0, 0, 1, 1}) == doctest::Approx(1.0));
    CHECK(nmi({0, 0, 1, 1}, {5, 5, 2, 2}) == doctest::Approx(1.0)); // label names irrelevant
    CHECK(nmi({0, 0, 1, 1}, {3, 3, 3, 3}) == doctest::Approx(0.0));
    CHECK(nmi({0, 0, 1, 1}, {0, 1, 1, 1}) == doctest::Approx(0.34559).epsilon(1e-4));
    CHECK_THROWS_AS(nmi({0, 1}, {0}), InvalidArgumentError);
}

TEST_CASE("ari worked examples") {
    CHECK(ari({0, 0, 1, 1}, {0, 0, 1, 1}) == doctest::Approx(1.0));
    CHECK(ari({0, 0, 1, 1}, {1, 1, 0, 0}) == doctest::Approx(1.0));
    CHECK(ari({0, 0, 1, 1}, {2, 2, 2, 2}) == doctest::Approx(0.0));
    CHECK(ari({0, 0, 1, 1}, {0, 1, 1, 1}) ==
          doctest::Approx(oracle_ari({0, 0, 1, 1}, {0, 1, 1, 1})).epsilon(1e-12));
    CHECK_THROWS_AS(ari({0, 1}, {0}), InvalidArgumentError);
}

TEST_CASE("metrics match brute-force oracles on random labelings") {
    std::mt19937_64 rng(313);
    std::uniform_int_distribution<int> n_dist(2, 200), k_dist(1, 8);
    for (int trial = 0; trial < 500; ++trial) {
        int n = n_dist(rng);
        std::uniform_int_distribution<int> lt(0, k_dist(rng) - 1), lp(0, k_dist(rng) - 1);
        std::vector<int> truth(n), pred(n);
        for (int i = 0; i < n; ++i) {
            truth[i] = lt(rng);
            pred[i] = lp(rng);
        }
        CHECK(nmi(truth, pred) == doctest::Approx(oracle_nmi(truth, pred)).epsilon(1e-9));
        CHECK(ari(truth, pred) == doctest::Approx(oracle_ari(truth, pred)).epsilon(1e-9));
    }
}

TEST_CASE("label permutation invariance") {
    std::mt19937_64 rng(17);
    std::vector<int> truth(100), pred(100);
    std::uniform_int_distribution<int> l(0, 4);
    for (int i = 0; i < 100; ++i) {
        truth[i] = l(rng);
        pred[i] = l(rng);
    }
    double n0 = nmi(truth, pred), a0 = ari(truth, pred);
    std::vector<int> relabel = {3, 0, 4, 1, 2};
    std::vector<int> pred2(100);
    for (int i = 0; i < 100; ++i) pred2[i] = relabel[static_cast<std::size_t>(pred[i])];
    CHECK(nmi(truth, pred2) == doctest::Approx(n0).epsilon(1e-12));
    CHECK(ari(truth, pred2) == doctest::Approx(a0).epsilon(1e-12));
}

TEST_CASE("shuffled prediction has near-zero expected ari") {
    std::mt19937_64 rng(600);
    int n = 100;
    std::vector<int> truth(n), pred(n);
    for (int i = 0; i < n; ++i) truth[i] = pred[i] = i % 4;
    double mean = 0.0;
    int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        std::shuffle(pred.begin(), pred.end(), rng);
        mean += ari(truth, pred);
    }
    mean /= trials;
    CHECK(std::abs(mean) < 0.02);
}

TEST_CASE("normalized regret") {
    auto r = normalized_regret({{"a", 0.8}, {"b", 0.4}});
    CHECK(r["a"] == doctest::Approx(0.0));
    CHECK(r["b"] == doctest::Approx(1.0));

    auto r3 = normalized_regret({{"a", 0.9}, {"b", 0.6}, {"c", 0.5}});
    CHECK(r3["a"] == doctest::Approx(0.0));
    CHECK(r3["b"] == doctest::Approx(0.75));
    CHECK(r3["c"] == doctest::Approx(1.0));

    auto req = normalized_regret({{"a", 0.5}, {"b", 0.5}});
    CHECK(req["a"] == doctest::Approx(0.0));
    CHECK(req["b"] == doctest::Approx(0.0));

    CHECK_THROWS_AS(normalized_regret({{"only", 1.0}}), InvalidArgumentError);
}
