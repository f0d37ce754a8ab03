#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "classimap/error.hpp"
#include "classimap/geometry.hpp"

namespace classimap {

/// Counts of rank-distortion pairs split by class co-membership. False
/// neighborhoods are pairs that are k-neighbors in the map but not in the
/// input; tears are k-neighbors in the input but not in the map.
struct DistortionCensus {
    std::size_t fn_within = 0;
    std::size_t fn_between = 0;
    std::size_t tear_within = 0;
    std::size_t tear_between = 0;
};

struct MapQualityReport {
    std::size_t k = 0;
    double trustworthiness = 0.0;
    double continuity = 0.0;
    double knn_accuracy = 0.0;
    std::size_t fn_within = 0;
    std::size_t fn_between = 0;
    std::size_t tear_within = 0;
    std::size_t tear_between = 0;
};

namespace detail {

inline void check_k_range(std::size_t k, std::size_t n) {
    if (k < 1 || k + 1 > n) throw InvalidK("k must satisfy 1 <= k <= n-1");
}

// Neighbor candidates of i ordered by (distance, index); ties go to the lower
// index so every neighborhood is deterministic.
inline std::vector<std::size_t> sorted_others(const DissimilarityMatrix& d, std::size_t i) {
    const std::size_t n = d.size();
    std::vector<std::size_t> order;
    order.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
        if (j != i) order.push_back(j);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double da = d(i, a), db = d(i, b);
        if (da != db) return da < db;
        return a < b;
    });
    return order;
}

// rank[i][j]: 1-based position of j in i's distance ordering (rank of self is 0).
inline std::vector<std::vector<std::size_t>> rank_matrix(const DissimilarityMatrix& d) {
    const std::size_t n = d.size();
    std::vector<std::vector<std::size_t>> rank(n, std::vector<std::size_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        const auto order = sorted_others(d, i);
        for (std::size_t r = 0; r < order.size(); ++r) rank[i][order[r]] = r + 1;
    }
    return rank;
}

inline std::vector<std::vector<bool>> membership(const std::vector<std::vector<std::size_t>>& knn,
                                                 std::size_t n) {
    std::vector<std::vector<bool>> in(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : knn[i]) in[i][j] = true;
    return in;
}

} // namespace detail

/// Each point's k nearest others, in rank order; ties broken by lower index.
inline std::vector<std::vector<std::size_t>> knn_sets(const DissimilarityMatrix& d, std::size_t k) {
    const std::size_t n = d.size();
    detail::check_k_range(k, n);
    std::vector<std::vector<std::size_t>> knn(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto order = detail::sorted_others(d, i);
        order.resize(k);
        knn[i] = std::move(order);
    }
    return knn;
}

namespace detail {

// Shared scaffolding of trustworthiness and continuity: penalize points that
// are k-neighbors under `near` but not under `truth`, by their rank excess
// over k in `truth`'s ordering.
inline double rank_penalty_score(const DissimilarityMatrix& truth, const DissimilarityMatrix& near,
                                 std::size_t k) {
    const std::size_t n = truth.size();
    if (n != near.size()) throw DimensionMismatch("distance matrices disagree on size");
    if (k < 1 || 2 * k >= n) throw InvalidK("k must satisfy 1 <= k < n/2");
    const auto knn_truth = membership(knn_sets(truth, k), n);
    const auto knn_near = knn_sets(near, k);
    const auto rank_truth = rank_matrix(truth);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : knn_near[i])
            if (!knn_truth[i][j]) sum += static_cast<double>(rank_truth[i][j] - k);
    const double norm = 2.0 / (static_cast<double>(n) * static_cast<double>(k) *
                               static_cast<double>(2 * n - 3 * k - 1));
    return 1.0 - norm * sum;
}

} // namespace detail

/// 1 minus the normalized input-rank excess of map neighbors that are not
/// input neighbors; 1.0 means no false neighborhoods at size k.
inline double trustworthiness(const DissimilarityMatrix& d_in, const Embedding& e, std::size_t k) {
    if (e.size() != d_in.size()) throw DimensionMismatch("embedding size does not match matrix");
    return detail::rank_penalty_score(d_in, map_distances(e), k);
}

/// 1 minus the normalized map-rank excess of input neighbors that are not map
/// neighbors; 1.0 means no tears at size k.
inline double continuity(const DissimilarityMatrix& d_in, const Embedding& e, std::size_t k) {
    if (e.size() != d_in.size()) throw DimensionMismatch("embedding size does not match matrix");
    return detail::rank_penalty_score(map_distances(e), d_in, k);
}

/// Pair census of rank distortions. A pair is a neighbor pair in a space when
/// either endpoint lists the other in its k-NN set (symmetric union); false
/// neighborhoods are map-only neighbor pairs, tears input-only, each counted
/// into the within- or between-class bin.
inline DistortionCensus distortion_census(const DissimilarityMatrix& d_in, const Embedding& e,
                                          const CoMembership& co, std::size_t k) {
    const std::size_t n = d_in.size();
    if (e.size() != n || co.size() != n)
        throw DimensionMismatch("census inputs disagree on size");
    detail::check_k_range(k, n);
    const auto in_member = detail::membership(knn_sets(d_in, k), n);
    const auto map_member = detail::membership(knn_sets(map_distances(e), k), n);
    DistortionCensus census;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool near_in = in_member[i][j] || in_member[j][i];
            const bool near_map = map_member[i][j] || map_member[j][i];
            if (near_map && !near_in) {
                if (co.same_class(i, j)) ++census.fn_within;
                else ++census.fn_between;
            } else if (near_in && !near_map) {
                if (co.same_class(i, j)) ++census.tear_within;
                else ++census.tear_between;
            }
        }
    return census;
}

/// Leave-one-out majority vote over each point's k map-neighbors. When the
/// vote ties, the label of the lowest-index neighbor among the tied labels
/// wins.
inline double knn_label_accuracy(const Embedding& e, const Labels& labels, std::size_t k) {
    const std::size_t n = e.size();
    if (labels.size() != n) throw DimensionMismatch("label count does not match embedding");
    detail::check_k_range(k, n);
    const auto knn = knn_sets(map_distances(e), k);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::map<std::string, std::size_t> votes;
        for (std::size_t j : knn[i]) ++votes[labels[j]];
        std::size_t top = 0;
        for (const auto& [label, count] : votes) top = std::max(top, count);
        std::size_t best_index = n;
        std::string winner;
        for (std::size_t j : knn[i])
            if (votes[labels[j]] == top && j < best_index) {
                best_index = j;
                winner = labels[j];
            }
        if (winner == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

/// Largest k usable by every metric at once (trustworthiness/continuity need
/// k < n/2, the census and vote need k <= n-1).
inline std::size_t max_quality_k(std::size_t n) { return n >= 3 ? (n - 1) / 2 : 0; }

/// Full quality report at one neighborhood size. k = 0 selects the default:
/// 10, lowered when n is too small for the rank scores to be defined.
inline MapQualityReport evaluate_map(const DissimilarityMatrix& d_in, const Embedding& e,
                                     const Labels& labels, std::size_t k = 0) {
    const std::size_t n = d_in.size();
    const std::size_t k_max = max_quality_k(n);
    if (k_max < 1) throw InvalidK("need n >= 3 to evaluate map quality");
    if (k == 0) k = std::min<std::size_t>(10, k_max);
    if (k > k_max)
        throw InvalidK("k must satisfy 1 <= k < n/2 (n = " + std::to_string(n) + ")");
    const CoMembership co = co_membership(labels);
    const DistortionCensus census = distortion_census(d_in, e, co, k);
    MapQualityReport report;
    report.k = k;
    report.trustworthiness = trustworthiness(d_in, e, k);
    report.continuity = continuity(d_in, e, k);
    report.knn_accuracy = knn_label_accuracy(e, labels, k);
    report.fn_within = census.fn_within;
    report.fn_between = census.fn_between;
    report.tear_within = census.tear_within;
    report.tear_between = census.tear_between;
    return report;
}

} // namespace classimap
