#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "classimap/error.hpp"
#include "classimap/geometry.hpp"

namespace classimap {

/// Parameters of the neighborhood weighting function at one annealing state.
///
/// The weight of a pair is a Gaussian tail probability: large for distances
/// below mu, decaying over a scale of sigma. Both are derived from the input
/// distance statistics and the annealing parameter lambda; sigma is the
/// absolute value of the signed scale -2*lambda*std, which is equivalent
/// because the Gaussian density depends only on its squared scale.
struct WeightParams {
    double lambda = 0.0;   ///< annealing parameter in [0, 1]
    double mu = 0.0;       ///< weight midpoint, in input distance units
    double sigma = 1.0;    ///< positive Gaussian scale, in input distance units
    double exponent = 1.0; ///< stress exponent p
};

/// Derives (mu, sigma) from distance statistics and the annealing parameter:
/// mu = mean - 2*(1-lambda)*std, sigma = 2*lambda*std. A vanishing sigma
/// (all distances equal, or lambda = 0) is clamped to a tiny positive scale
/// so the weight degrades to a sharp step at mu.
inline WeightParams weight_params(const PairStats& stats, double lambda, double exponent = 1.0) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidLambda("lambda must lie in [0, 1]");
    if (!(exponent > 0.0)) throw InvalidArgument("stress exponent must be positive");
    if (!(stats.stddev >= 0.0)) throw InvalidArgument("negative standard deviation");
    WeightParams p;
    p.lambda = lambda;
    p.exponent = exponent;
    p.mu = stats.mean - 2.0 * (1.0 - lambda) * stats.stddev;
    p.sigma = 2.0 * lambda * stats.stddev;
    if (p.sigma <= 0.0) p.sigma = 1e-9 * std::max(stats.mean, 1.0);
    return p;
}

/// Neighborhood weight F(x) = 1 - Phi((x - mu)/sigma): strictly decreasing,
/// 0.5 at mu, clamped into the open interval (0, 1) where the Gaussian tail
/// underflows.
inline double weight(double x, const WeightParams& p) {
    const double z = (x - p.mu) / p.sigma;
    double w = 0.5 * std::erfc(z / std::numbers::sqrt2);
    if (w <= 0.0) return std::numeric_limits<double>::min();
    const double below_one = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    if (w >= 1.0) return below_one;
    return w;
}

/// Derivative of the weight: minus the Gaussian density at x. Always negative.
inline double weight_derivative(double x, const WeightParams& p) {
    constexpr double inv_sqrt_2pi = std::numbers::inv_sqrtpi / std::numbers::sqrt2;
    const double z = (x - p.mu) / p.sigma;
    return -(inv_sqrt_2pi / p.sigma) * std::exp(-0.5 * z * z);
}

/// Linear annealing schedule for lambda. Endpoints are returned exactly.
inline double lambda_at(long step, long total_steps, double lambda_start, double lambda_end) {
    if (total_steps < 1) throw InvalidSchedule("schedule needs at least 1 step");
    if (step < 0 || step > total_steps) throw InvalidSchedule("step outside [0, total_steps]");
    if (step == 0) return lambda_start;
    if (step == total_steps) return lambda_end;
    const double t = static_cast<double>(step) / static_cast<double>(total_steps);
    return lambda_start + t * (lambda_end - lambda_start);
}

} // namespace classimap
