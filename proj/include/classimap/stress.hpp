#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "classimap/error.hpp"
#include "classimap/geometry.hpp"
#include "classimap/parallel.hpp"
#include "classimap/weighting.hpp"

namespace classimap {

/// Which pair weighting the stress uses.
///
/// ClassiMap weights a pair by the input distance when the two points share
/// a class and by the map distance otherwise. SammonWeighted always uses the
/// input distance, CCAWeighted always the map distance; they are the two
/// degenerate single-branch cases and serve as baselines.
enum class StressMode { ClassiMap, SammonWeighted, CCAWeighted };

struct StressOptions {
    int workers = 1;
    /// Drop the weight-derivative term from the map-distance-weighted
    /// gradient, matching the classical CCA update rule. The default keeps
    /// the full analytic gradient, which is what finite differences validate.
    bool cca_simplified_gradient = false;
};

/// Stress contribution of one unordered pair together with the gradient of
/// that contribution with respect to both endpoints. The two gradients are
/// equal and opposite.
struct PairStressTerm {
    std::size_t i = 0;
    std::size_t j = 0;
    double value = 0.0;
    double map_dist = 0.0;
    Vec2 grad_i{0.0, 0.0};
    Vec2 grad_j{0.0, 0.0};
};

namespace detail {

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

inline double abs_pow(double a, double p) {
    if (p == 1.0) return a;
    if (p == 2.0) return a * a;
    return std::pow(a, p);
}

// p * a^(p-1) for a = |d - d*| >= 0. For p < 1 this diverges at the kink,
// so the base is floored at 1e-12.
inline double abs_pow_slope(double a, double p) {
    if (p == 1.0) return 1.0;
    if (p == 2.0) return 2.0 * a;
    if (p < 1.0) a = std::max(a, 1e-12);
    return p * std::pow(a, p - 1.0);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic pseudo-random unit direction for a coincident pair, so that
// repeated runs resolve the singularity identically.
inline Vec2 pair_jitter_direction(std::size_t i, std::size_t j) {
    const std::uint64_t h = splitmix64((static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(j));
    const double angle = 2.0 * std::numbers::pi * (static_cast<double>(h >> 11) * 0x1.0p-53);
    return {std::cos(angle), std::sin(angle)};
}

inline bool uses_input_weight(StressMode mode, bool same_class) {
    return mode == StressMode::SammonWeighted || (mode == StressMode::ClassiMap && same_class);
}

} // namespace detail

/// Stress and gradient of one pair. `input_weight` must be the neighborhood
/// weight evaluated at the pair's input distance (callers that sweep many
/// pairs against fixed params precompute it). `jitter_magnitude` is the
/// repulsion applied to coincident mapped points, typically a tiny fraction
/// of the mean input distance.
inline PairStressTerm pair_stress(std::size_t i, std::size_t j, double input_dist, bool same_class,
                                  const Vec2& yi, const Vec2& yj, const WeightParams& params,
                                  StressMode mode, double input_weight, double jitter_magnitude,
                                  bool cca_simplified_gradient = false) {
    PairStressTerm term;
    term.i = i;
    term.j = j;

    const double p = params.exponent;
    const double dstar = point_distance(yi, yj);
    term.map_dist = dstar;
    const bool input_side = detail::uses_input_weight(mode, same_class);
    const double w = input_side ? input_weight : weight(dstar, params);
    const double diff = input_dist - dstar;
    const double adiff = std::fabs(diff);
    term.value = detail::abs_pow(adiff, p) * w;

    if (dstar <= 0.0) {
        const Vec2 dir = detail::pair_jitter_direction(i, j);
        term.grad_i = {-jitter_magnitude * dir[0], -jitter_magnitude * dir[1]};
        term.grad_j = {jitter_magnitude * dir[0], jitter_magnitude * dir[1]};
        return term;
    }

    const double s = detail::sgn(diff);
    double g = -s * detail::abs_pow_slope(adiff, p) * w;
    if (!input_side && !cca_simplified_gradient)
        g += detail::abs_pow(adiff, p) * weight_derivative(dstar, params);

    const Vec2 u{(yi[0] - yj[0]) / dstar, (yi[1] - yj[1]) / dstar};
    term.grad_i = {g * u[0], g * u[1]};
    term.grad_j = {-g * u[0], -g * u[1]};
    return term;
}

/// Stress of the pair (i, j) given its current map distance.
inline double local_stress(std::size_t i, std::size_t j, const DissimilarityMatrix& d, double dstar,
                           const CoMembership& a, const WeightParams& params, StressMode mode) {
    const std::size_t n = d.size();
    if (i >= n || j >= n || i == j) throw IndexOutOfRange("pair indices out of range");
    if (!(dstar >= 0.0)) throw InvalidArgument("negative map distance");
    const bool input_side = detail::uses_input_weight(mode, a.same_class(i, j));
    const double w = input_side ? weight(d(i, j), params) : weight(dstar, params);
    return detail::abs_pow(std::fabs(d(i, j) - dstar), params.exponent) * w;
}

namespace detail {

inline void check_dims(const Embedding& e, const DissimilarityMatrix& d, const CoMembership& a) {
    if (e.size() != d.size() || a.size() != d.size())
        throw DimensionMismatch("embedding, dissimilarity matrix and co-membership sizes differ");
}

} // namespace detail

/// Total stress: sum of the pair stress over all unordered pairs i < j.
/// Zero exactly when every map distance equals its input distance.
inline double total_stress(const Embedding& e, const DissimilarityMatrix& d, const CoMembership& a,
                           const WeightParams& params, StressMode mode, const StressOptions& opts = {}) {
    detail::check_dims(e, d, a);
    const std::size_t n = d.size();
    const int workers = std::max(1, opts.workers);
    std::vector<double> partial(static_cast<std::size_t>(workers), 0.0);
    detail::fan_out(workers, [&](int w) {
        double sum = 0.0;
        for (std::size_t i = static_cast<std::size_t>(w); i < n; i += static_cast<std::size_t>(workers)) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const bool input_side = detail::uses_input_weight(mode, a.same_class(i, j));
                const double dstar = map_distance(e, i, j);
                const double wt = input_side ? weight(d(i, j), params) : weight(dstar, params);
                sum += detail::abs_pow(std::fabs(d(i, j) - dstar), params.exponent) * wt;
            }
        }
        partial[static_cast<std::size_t>(w)] = sum;
    });
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

/// Total stress divided by the same-mode weighted sum of input distances
/// (sum of w_ij * d_ij^p). A scale-free variant for cross-dataset
/// comparison; the raw sum above is the stress proper.
inline double normalized_stress(const Embedding& e, const DissimilarityMatrix& d, const CoMembership& a,
                                const WeightParams& params, StressMode mode, const StressOptions& opts = {}) {
    detail::check_dims(e, d, a);
    const std::size_t n = d.size();
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool input_side = detail::uses_input_weight(mode, a.same_class(i, j));
            const double wt = input_side ? weight(d(i, j), params) : weight(map_distance(e, i, j), params);
            denom += wt * detail::abs_pow(d(i, j), params.exponent);
        }
    }
    if (denom <= 0.0) return 0.0;
    return total_stress(e, d, a, params, mode, opts) / denom;
}

/// Analytic gradient of the total stress with respect to every map
/// coordinate. Coincident mapped points receive a deterministic tiny
/// repulsion since the pair direction is undefined there.
inline std::vector<Vec2> stress_gradient(const Embedding& e, const DissimilarityMatrix& d,
                                         const CoMembership& a, const WeightParams& params,
                                         StressMode mode, const StressOptions& opts = {}) {
    detail::check_dims(e, d, a);
    const std::size_t n = d.size();
    const double jitter = 1e-6 * pairwise_stats(d).mean;
    const int workers = std::max(1, opts.workers);
    std::vector<std::vector<Vec2>> buffers(static_cast<std::size_t>(workers),
                                           std::vector<Vec2>(n, Vec2{0.0, 0.0}));
    detail::fan_out(workers, [&](int w) {
        auto& buf = buffers[static_cast<std::size_t>(w)];
        for (std::size_t i = static_cast<std::size_t>(w); i < n; i += static_cast<std::size_t>(workers)) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const bool same = a.same_class(i, j);
                const double fin = detail::uses_input_weight(mode, same) ? weight(d(i, j), params) : 0.0;
                const PairStressTerm term = pair_stress(i, j, d(i, j), same, e[i], e[j], params, mode,
                                                        fin, jitter, opts.cca_simplified_gradient);
                buf[i][0] += term.grad_i[0];
                buf[i][1] += term.grad_i[1];
                buf[j][0] += term.grad_j[0];
                buf[j][1] += term.grad_j[1];
            }
        }
    });
    std::vector<Vec2> grad(n, Vec2{0.0, 0.0});
    for (const auto& buf : buffers)
        for (std::size_t i = 0; i < n; ++i) {
            grad[i][0] += buf[i][0];
            grad[i][1] += buf[i][1];
        }
    return grad;
}

} // namespace classimap
