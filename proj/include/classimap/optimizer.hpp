#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "classimap/error.hpp"
#include "classimap/geometry.hpp"
#include "classimap/stress.hpp"
#include "classimap/weighting.hpp"

namespace classimap {

enum class InitMethod { ClassicalMDS, RandomGaussian };

/// Knobs of the annealed stochastic descent. Learning rates are multiples of
/// the mean input distance, so behavior does not depend on the input scale.
struct OptimizerConfig {
    int epochs = 200;
    int steps_per_epoch = 0; ///< 0 means one step per data point
    double learning_rate_start = 0.5;
    double learning_rate_end = 0.01;
    double lambda_start = 0.9;
    double lambda_end = 0.1;
    double exponent = 1.0; ///< stress exponent p
    std::uint64_t seed = 0;
    InitMethod init = InitMethod::RandomGaussian;
    StressMode mode = StressMode::ClassiMap;
    int workers = 1;
    bool cca_simplified_gradient = false;
};

struct TraceRecord {
    int epoch = 0;
    double lambda = 0.0;
    double learning_rate = 0.0;
    double total_stress = 0.0; ///< stress under this epoch's weight params
};

/// Per-epoch history of a run. Epoch stresses are evaluated with the weight
/// params active during that epoch; the best-epoch selection compares every
/// epoch-end embedding (and the initial one) under the final-lambda params,
/// a single consistent yardstick.
struct RunTrace {
    std::vector<TraceRecord> records;
    int best_epoch = -1; ///< -1 when the initial embedding was never improved
    double best_stress = 0.0;       ///< selection stress of the returned embedding
    double final_epoch_stress = 0.0; ///< last record's stress
    double duration_seconds = 0.0;
};

struct RunResult {
    Embedding embedding;
    RunTrace trace;
};

/// A map coordinate became non-finite during descent; carries the history up
/// to the last completed epoch. With residual-capped updates this is a
/// defensive guard rather than an expected failure mode.
class NonFiniteUpdate : public Error {
public:
    NonFiniteUpdate(const std::string& msg, RunTrace partial) : Error(msg), trace(std::move(partial)) {}
    RunTrace trace;
};

namespace detail {

inline void validate_config(const OptimizerConfig& cfg) {
    if (cfg.epochs < 1) throw InvalidSchedule("epochs must be >= 1");
    if (cfg.steps_per_epoch < 0) throw InvalidArgument("steps_per_epoch must be >= 0");
    if (!(cfg.learning_rate_start > 0.0) || !(cfg.learning_rate_end > 0.0))
        throw InvalidArgument("learning rates must be positive");
    if (!(cfg.lambda_start >= 0.0 && cfg.lambda_start <= 1.0) ||
        !(cfg.lambda_end >= 0.0 && cfg.lambda_end <= 1.0))
        throw InvalidLambda("lambda endpoints must lie in [0, 1]");
    if (!(cfg.exponent > 0.0)) throw InvalidArgument("stress exponent must be positive");
    if (cfg.workers < 1) throw InvalidArgument("workers must be >= 1");
}

inline Embedding random_gaussian_init(std::size_t n, double mean_dist, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> gauss(0.0, 0.1 * mean_dist);
    Embedding e(n);
    for (std::size_t i = 0; i < n; ++i) {
        e[i][0] = gauss(engine);
        e[i][1] = gauss(engine);
    }
    return e;
}

// Classical MDS: double-center the squared distances and expand the top two
// eigenpairs. Returns false when the spectrum is unusable for a 2-D layout.
// The constant vector always contributes a zero eigenvalue and the trace is
// positive, so "non-Euclidean" shows up as a materially negative BOTTOM
// eigenvalue, not as a negative second-largest one; a second eigenvalue near
// zero is legitimate (collinear configurations) and maps to a zero second
// coordinate instead of a fallback.
inline bool classical_mds_init(const DissimilarityMatrix& d, Embedding& out, std::string* why) {
    const auto n = static_cast<Eigen::Index>(d.size());
    Eigen::MatrixXd sq(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = d(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            sq(i, j) = v * v;
        }
    const Eigen::VectorXd row_mean = sq.rowwise().mean();
    const double grand_mean = row_mean.mean();
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            gram(i, j) = -0.5 * (sq(i, j) - row_mean(i) - row_mean(j) + grand_mean);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) {
        if (why) *why = "eigendecomposition did not converge";
        return false;
    }
    const Eigen::VectorXd& values = solver.eigenvalues(); // ascending
    const double top = values(n - 1);
    const double second = values(n - 2);
    if (!(top > 0.0)) {
        if (why) *why = "no positive eigenvalue (degenerate configuration)";
        return false;
    }
    if (values(0) < -1e-9 * top) {
        if (why) *why = "materially negative eigenvalue (non-Euclidean input)";
        return false;
    }
    const double scale_top = std::sqrt(top);
    const double scale_second = second > 1e-12 * top ? std::sqrt(second) : 0.0;
    out = Embedding(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)][0] = scale_top * solver.eigenvectors()(i, n - 1);
        out[static_cast<std::size_t>(i)][1] = scale_second * solver.eigenvectors()(i, n - 2);
    }
    return true;
}

} // namespace detail

/// Initial embedding. ClassicalMDS falls back to RandomGaussian when the
/// double-centered spectrum cannot support a 2-D layout; `warning` (if
/// non-null) receives the reason.
inline Embedding initialize(const DissimilarityMatrix& d, const OptimizerConfig& config,
                            std::string* warning = nullptr) {
    detail::validate_config(config);
    if (d.size() < 2) throw DegenerateInput("need at least 2 points");
    const double mean_dist = pairwise_stats(d).mean;
    if (config.init == InitMethod::ClassicalMDS) {
        Embedding e;
        std::string why;
        if (detail::classical_mds_init(d, e, &why)) return e;
        if (warning) *warning = "classical MDS initialization failed (" + why + "); using random layout";
    }
    return detail::random_gaussian_init(d.size(), mean_dist, config.seed);
}

/// Weight params for a given epoch of the configured schedule: lambda moves
/// linearly from lambda_start at epoch 0 to lambda_end at epoch == epochs.
/// Early epochs give a wide sigma (global arrangement), late epochs a narrow
/// one (local refinement).
inline WeightParams anneal_state(int epoch, const OptimizerConfig& config, const PairStats& stats) {
    const double lambda =
        lambda_at(epoch, config.epochs, config.lambda_start, config.lambda_end);
    return weight_params(stats, lambda, config.exponent);
}

/// Minimizes the selected stress by annealed stochastic descent.
///
/// Each epoch refreshes lambda (and with it the weight params), then performs
/// steps_per_epoch anchor updates: a random anchor point is drawn and every
/// other point moves along its side of the anchor-pair gradient, scaled by
/// the current learning rate; the anchor itself stays put during its step.
/// Displacements are capped at the pair's |d - d*| residual, so a single
/// update never moves a point past the position that satisfies its pair.
/// The schedule spans epochs 0..epochs-1 with lambda hitting lambda_start at
/// the first epoch and lambda_end at the last. The returned embedding is the
/// best epoch-end state (the initial embedding included) judged under the
/// final-lambda params.
inline RunResult run(const DissimilarityMatrix& d, const Labels& labels, const OptimizerConfig& config,
                     std::string* warning = nullptr) {
    detail::validate_config(config);
    const std::size_t n = d.size();
    if (labels.size() != n) throw DimensionMismatch("label count does not match matrix size");

    const auto t0 = std::chrono::steady_clock::now();
    const CoMembership co = co_membership(labels);
    const PairStats stats = pairwise_stats(d);
    const double mean_dist = stats.mean;
    const double jitter = 1e-6 * mean_dist;
    const int steps = config.steps_per_epoch > 0 ? config.steps_per_epoch : static_cast<int>(n);
    const long denom = std::max<long>(config.epochs - 1, 1);
    const StressOptions stress_opts{config.workers, config.cca_simplified_gradient};
    const WeightParams params_end = weight_params(stats, config.lambda_end, config.exponent);

    Embedding emb = initialize(d, config, warning);
    std::mt19937_64 anchor_engine(detail::splitmix64(config.seed ^ 0xA5C1u));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    RunTrace trace;
    trace.records.reserve(static_cast<std::size_t>(config.epochs));
    Embedding best = emb;
    double best_stress = total_stress(emb, d, co, params_end, config.mode, stress_opts);
    trace.best_epoch = -1;

    std::vector<double> input_weight_cache(n * n, 0.0);
    const double log_ratio = std::log(config.learning_rate_end / config.learning_rate_start);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const double lambda = lambda_at(epoch, denom, config.lambda_start, config.lambda_end);
        const WeightParams params = weight_params(stats, lambda, config.exponent);
        const double lr_factor =
            epoch == denom ? config.learning_rate_end
                           : config.learning_rate_start *
                                 std::exp(log_ratio * static_cast<double>(epoch) / static_cast<double>(denom));
        const double lr = lr_factor * mean_dist;

        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (detail::uses_input_weight(config.mode, co.same_class(i, j))) {
                    const double w = weight(d(i, j), params);
                    input_weight_cache[i * n + j] = w;
                    input_weight_cache[j * n + i] = w;
                }

        for (int step = 0; step < steps; ++step) {
            const std::size_t anchor = pick(anchor_engine);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == anchor) continue;
                const PairStressTerm term =
                    pair_stress(anchor, j, d(anchor, j), co.same_class(anchor, j), emb[anchor], emb[j],
                                params, config.mode, input_weight_cache[anchor * n + j], jitter,
                                config.cca_simplified_gradient);
                // Exact line search for the pair objective: a step past the
                // point where d* meets d flips the residual's sign and buys
                // nothing, so the displacement is capped at |d - d*|. Every
                // update then keeps the pair distance inside
                // [min(d, d*), max(d, d*)], which bounds the whole trajectory
                // and lets late epochs quiet down instead of jittering at the
                // learning-rate scale.
                double step_x = lr * term.grad_j[0];
                double step_y = lr * term.grad_j[1];
                const double step_len = std::hypot(step_x, step_y);
                const double residual = std::fabs(d(anchor, j) - term.map_dist);
                if (step_len > residual && step_len > 0.0) {
                    const double cap = residual / step_len;
                    step_x *= cap;
                    step_y *= cap;
                }
                emb[j][0] -= step_x;
                emb[j][1] -= step_y;
                if (!std::isfinite(emb[j][0]) || !std::isfinite(emb[j][1])) {
                    trace.duration_seconds =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                    throw NonFiniteUpdate("map coordinate became non-finite at epoch " +
                                              std::to_string(epoch),
                                          trace);
                }
            }
        }

        const double epoch_stress = total_stress(emb, d, co, params, config.mode, stress_opts);
        const double selection_stress =
            epoch == denom ? epoch_stress
                           : total_stress(emb, d, co, params_end, config.mode, stress_opts);
        if (selection_stress < best_stress) {
            best_stress = selection_stress;
            best = emb;
            trace.best_epoch = epoch;
        }
        trace.records.push_back({epoch, lambda, lr, epoch_stress});
    }

    trace.best_stress = best_stress;
    trace.final_epoch_stress = trace.records.back().total_stress;
    trace.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(best), std::move(trace)};
}

} // namespace classimap
