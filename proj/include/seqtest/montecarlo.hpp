#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "seqtest/analysis.hpp"
#include "seqtest/penalty.hpp"

namespace seqtest {

struct SimConfig {
    double prior = 0.5;         ///< P(theta = 1)
    std::size_t n_paths = 1000;
    double dt = 1e-4;
    double t_max = 50.0;        ///< truncation horizon
    std::uint64_t seed = 0;
};

/// 50 / c: keeps truncation negligible for the shipped configurations.
double default_t_max(const ProblemParams& params);

/// Throws ParameterError unless prior in (0,1), n_paths >= 1, 0 < dt <= 1e-3 t_max.
void validate_config(const SimConfig& cfg);

struct PathSample {
    double t = 0.0;
    double posterior = 0.0;
};

struct PosteriorPath {
    int theta = 0;
    std::vector<PathSample> samples;  ///< t = 0, dt, 2 dt, ..., t_max
};

/**
 * One path of the posterior on the time grid. theta ~ Bernoulli(prior),
 * X gets exact Gaussian increments N(alpha theta dt, sigma^2 dt), and
 * Pi_t = pi e^u / (pi e^u + 1 - pi) with u = (alpha / sigma^2)(X_t - alpha t / 2).
 * The random stream depends only on (cfg.seed, path_index).
 */
PosteriorPath simulate_posterior_path(const ProblemParams& params, const SimConfig& cfg,
                                      std::uint64_t path_index);

struct RiskEstimate {
    double mean_risk = 0.0;
    double std_error = 0.0;       ///< sample std / sqrt(n_paths)
    double mean_stop_time = 0.0;
    double truncated_fraction = 0.0;
    /// Mean distance of Pi_tau beyond the boundary it crossed (paths that moved).
    double mean_overshoot = 0.0;
    std::size_t n_paths = 0;
    double dt = 0.0;
    double t_max = 0.0;
    /// truncated_fraction > 1%.
    bool unreliable = false;
};

/**
 * Monte Carlo estimate of E[c tau + g(Pi_tau)] for tau = first grid time with
 * Pi outside (A, B). Paths still inside at t_max are stopped there and
 * counted as truncated. Paths run concurrently; the result is bit-identical
 * for a given config regardless of thread count.
 */
RiskEstimate estimate_risk(const ProblemParams& params, const Penalty& p, double a, double b,
                           const SimConfig& cfg);

}  // namespace seqtest
