#include "seqtest/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <thread>

#include "seqtest/errors.hpp"

namespace seqtest {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 path_stream(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ index));
}

std::size_t step_count(const SimConfig& cfg) {
    return static_cast<std::size_t>(std::llround(cfg.t_max / cfg.dt));
}

// Pairwise summation keeps the total independent of how paths were scheduled.
double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) {
            s += x;
        }
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

double posterior_from_log_odds(double l) {
    return 1.0 / (1.0 + std::exp(-l));
}

// Advances X and returns the log-odds of the posterior at time t.
class PathState {
public:
    PathState(const ProblemParams& params, const SimConfig& cfg, std::uint64_t index)
        : rng_(path_stream(cfg.seed, index)),
          alpha_(params.alpha()),
          sigma_(params.sigma()),
          dt_(cfg.dt),
          sqrt_dt_(std::sqrt(cfg.dt)),
          log_prior_odds_(std::log(cfg.prior) - std::log1p(-cfg.prior)) {
        theta_ = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < cfg.prior ? 1 : 0;
    }

    int theta() const { return theta_; }

    double step(std::size_t k) {
        x_ += alpha_ * theta_ * dt_ + sigma_ * sqrt_dt_ * normal_(rng_);
        const double t = static_cast<double>(k) * dt_;
        return log_prior_odds_ + alpha_ / (sigma_ * sigma_) * (x_ - 0.5 * alpha_ * t);
    }

    double initial_log_odds() const { return log_prior_odds_; }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
    double alpha_;
    double sigma_;
    double dt_;
    double sqrt_dt_;
    double log_prior_odds_;
    double x_ = 0.0;
    int theta_ = 0;
};

struct PathOutcome {
    double risk;
    double time;
    double overshoot;
    bool truncated;
};

}  // namespace

double default_t_max(const ProblemParams& params) {
    return 50.0 / params.cost();
}

void validate_config(const SimConfig& cfg) {
    if (!(cfg.prior > 0.0 && cfg.prior < 1.0)) {
        throw ParameterError("simulation prior must lie in (0,1)");
    }
    if (cfg.n_paths == 0) {
        throw ParameterError("simulation needs at least one path");
    }
    if (!(cfg.dt > 0.0) || !(cfg.t_max > 0.0) || cfg.dt > 1e-3 * cfg.t_max) {
        throw ParameterError("simulation needs 0 < dt <= 1e-3 * t_max");
    }
}

PosteriorPath simulate_posterior_path(const ProblemParams& params, const SimConfig& cfg,
                                      std::uint64_t path_index) {
    validate_config(cfg);
    PathState state(params, cfg, path_index);
    const std::size_t n = step_count(cfg);
    PosteriorPath path;
    path.theta = state.theta();
    path.samples.reserve(n + 1);
    path.samples.push_back({0.0, cfg.prior});
    for (std::size_t k = 1; k <= n; ++k) {
        const double l = state.step(k);
        path.samples.push_back({static_cast<double>(k) * cfg.dt, posterior_from_log_odds(l)});
    }
    return path;
}

RiskEstimate estimate_risk(const ProblemParams& params, const Penalty& p, double a, double b,
                           const SimConfig& cfg) {
    validate_config(cfg);
    if (!(a > 0.0 && b < 1.0 && a <= b)) {
        throw ParameterError("estimate_risk needs 0 < A <= B < 1");
    }
    if (!(cfg.prior > a && cfg.prior < b)) {
        RiskEstimate r;
        r.mean_risk = p.value(cfg.prior);
        r.n_paths = cfg.n_paths;
        r.dt = cfg.dt;
        r.t_max = cfg.t_max;
        return r;
    }
    const std::size_t n_steps = step_count(cfg);
    const double c = params.cost();
    const double lo = std::log(a) - std::log1p(-a);
    const double hi = std::log(b) - std::log1p(-b);

    auto run_path = [&](std::uint64_t index) -> PathOutcome {
        PathState state(params, cfg, index);
        double l = state.initial_log_odds();
        std::size_t k = 0;
        while (k < n_steps) {
            ++k;
            l = state.step(k);
            if (l <= lo || l >= hi) {
                break;
            }
        }
        const double t = static_cast<double>(k) * cfg.dt;
        const double pi = posterior_from_log_odds(l);
        const bool truncated = !(l <= lo || l >= hi);
        const double overshoot = truncated ? 0.0 : (l <= lo ? a - pi : pi - b);
        return {c * t + p.value(pi), t, std::max(overshoot, 0.0), truncated};
    };

    const std::size_t n = cfg.n_paths;
    std::vector<double> risk(n), time(n), overshoot(n), truncated(n), stopped(n);
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto o = run_path(i);
            risk[i] = o.risk;
            time[i] = o.time;
            overshoot[i] = o.overshoot;
            truncated[i] = o.truncated ? 1.0 : 0.0;
            stopped[i] = o.truncated ? 0.0 : 1.0;
        }
    };
    const std::size_t n_threads =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(n / 256, 1));
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + n_threads - 1) / n_threads;
    for (std::size_t t = 1; t < n_threads; ++t) {
        const std::size_t begin = std::min(n, t * chunk);
        pool.emplace_back(worker, begin, std::min(n, begin + chunk));
    }
    worker(0, std::min(n, chunk));
    for (auto& th : pool) {
        th.join();
    }

    const double dn = static_cast<double>(n);
    RiskEstimate est;
    est.n_paths = n;
    est.dt = cfg.dt;
    est.t_max = cfg.t_max;
    est.mean_risk = pairwise_sum(risk) / dn;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = risk[i] - est.mean_risk;
        sq[i] = d * d;
    }
    const double var = n > 1 ? pairwise_sum(sq) / (dn - 1.0) : 0.0;
    est.std_error = std::sqrt(var / dn);
    est.mean_stop_time = pairwise_sum(time) / dn;
    est.truncated_fraction = pairwise_sum(truncated) / dn;
    const double n_stopped = pairwise_sum(stopped);
    est.mean_overshoot = n_stopped > 0.0 ? pairwise_sum(overshoot) / n_stopped : 0.0;
    est.unreliable = est.truncated_fraction > 0.01;
    return est;
}

}  // namespace seqtest
