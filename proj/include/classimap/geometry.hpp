#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "classimap/error.hpp"

namespace classimap {

using Vec2 = std::array<double, 2>;

/// Class labels are opaque tokens compared by equality only.
using Labels = std::vector<std::string>;

/// Dense symmetric matrix of pairwise input dissimilarities.
///
/// Values must be nonnegative with a zero diagonal, but need not satisfy the
/// triangle inequality or come from any Euclidean configuration.
class DissimilarityMatrix {
public:
    DissimilarityMatrix() = default;

    explicit DissimilarityMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {
        if (n < 2) throw DegenerateInput("dissimilarity matrix needs at least 2 points");
    }

    /// Builds from a dense row-major n*n buffer, validating all invariants.
    static DissimilarityMatrix from_dense(std::size_t n, std::vector<double> values) {
        if (n < 2) throw DegenerateInput("dissimilarity matrix needs at least 2 points");
        if (values.size() != n * n) throw DimensionMismatch("dense buffer is not n*n");
        DissimilarityMatrix m;
        m.n_ = n;
        m.d_ = std::move(values);
        for (std::size_t i = 0; i < n; ++i) {
            if (m.d_[i * n + i] != 0.0)
                throw DataError("dissimilarity matrix has a nonzero diagonal entry");
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = m.d_[i * n + j];
                if (!std::isfinite(v)) throw DataError("non-finite dissimilarity entry");
                if (v < 0.0) throw NegativeDistance("negative dissimilarity entry");
                if (v != m.d_[j * n + i]) throw AsymmetricMatrix("dissimilarity matrix is not symmetric");
            }
        }
        return m;
    }

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

    /// Sets d(i,j) and d(j,i) together so symmetry cannot be broken.
    void set(std::size_t i, std::size_t j, double v) {
        d_[i * n_ + j] = v;
        d_[j * n_ + i] = v;
    }

    std::span<const double> data() const { return d_; }

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

/// Binary co-membership matrix: 1 where two points share a class label.
class CoMembership {
public:
    CoMembership() = default;

    explicit CoMembership(std::size_t n) : n_(n), a_(n * n, 0) {
        for (std::size_t i = 0; i < n; ++i) a_[i * n + i] = 1;
    }

    std::size_t size() const { return n_; }

    bool same_class(std::size_t i, std::size_t j) const { return a_[i * n_ + j] != 0; }

    std::uint8_t operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    void set_same(std::size_t i, std::size_t j) {
        a_[i * n_ + j] = 1;
        a_[j * n_ + i] = 1;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> a_;
};

/// 2-D map coordinates, one row per data point. Mutated only by the optimizer.
struct Embedding {
    std::vector<Vec2> points;

    Embedding() = default;
    explicit Embedding(std::size_t n) : points(n, Vec2{0.0, 0.0}) {}
    explicit Embedding(std::vector<Vec2> p) : points(std::move(p)) {}

    std::size_t size() const { return points.size(); }
    Vec2& operator[](std::size_t i) { return points[i]; }
    const Vec2& operator[](std::size_t i) const { return points[i]; }

    bool all_finite() const {
        for (const auto& p : points)
            if (!std::isfinite(p[0]) || !std::isfinite(p[1])) return false;
        return true;
    }
};

inline double point_distance(const Vec2& a, const Vec2& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return std::sqrt(dx * dx + dy * dy);
}

/// Map distance between points i and j of an embedding.
inline double map_distance(const Embedding& e, std::size_t i, std::size_t j) {
    return point_distance(e.points[i], e.points[j]);
}

inline CoMembership co_membership(const Labels& labels) {
    if (labels.empty()) throw DegenerateInput("empty label vector");
    const std::size_t n = labels.size();
    CoMembership a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (labels[i] == labels[j]) a.set_same(i, j);
    return a;
}

/// Euclidean distance matrix induced by a 2-D embedding.
inline DissimilarityMatrix map_distances(const Embedding& e) {
    const std::size_t n = e.size();
    DissimilarityMatrix d(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d.set(i, j, map_distance(e, i, j));
    return d;
}

struct PairStats {
    double mean = 0.0;
    double stddev = 0.0;
};

/// Mean and population standard deviation of a set of values.
inline PairStats population_stats(std::span<const double> values) {
    if (values.empty()) throw DegenerateInput("no values for statistics");
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) {
        const double c = v - mean;
        sq += c * c;
    }
    return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

/// Statistics of the input distances over the strict upper triangle (i < j);
/// the zero diagonal is excluded. All distances equal is not an error: the
/// standard deviation is simply 0 and handled by the weighting layer.
inline PairStats pairwise_stats(const DissimilarityMatrix& d) {
    const std::size_t n = d.size();
    std::vector<double> upper;
    upper.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            upper.push_back(d(i, j));
    return population_stats(upper);
}

} // namespace classimap
