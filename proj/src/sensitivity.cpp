#include "seqtest/sensitivity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "seqtest/errors.hpp"

namespace seqtest {

namespace {

constexpr double kMonotoneResolution = 1e-10;

SweepRow solve_row(const Penalty& p, double K, double tol, std::size_t envelope_points) {
    SweepRow row;
    row.K = K;
    const auto params = ProblemParams::from_K(K);
    BoundarySolution sol;
    try {
        sol = solve_auto(p, params, tol, envelope_points);
    } catch (const std::exception& e) {
        row.flagged = true;
        row.note = e.what();
        return row;
    }
    row.method = sol.method;
    if (sol.degenerate()) {
        row.degenerate = true;
        return row;
    }
    row.a_star = sol.a_star;
    row.b_star = sol.b_star;
    if (p.smooth()) {
        row.pi_star_lo = sol.pi_star_lo;
        row.pi_star_hi = sol.pi_star_hi;
    }
    if (sol.fallback) {
        row.flagged = true;
        row.note = sol.diagnostics;
    }
    try {
        const auto d = boundary_derivatives(p, params, sol);
        row.dA_dK = d.dA_dK;
        row.dB_dK = d.dB_dK;
    } catch (const std::exception& e) {
        row.flagged = true;
        row.note += e.what();
    }
    return row;
}

}  // namespace

BoundaryDerivatives boundary_derivatives(const Penalty& p, const ProblemParams& params,
                                         const BoundarySolution& sol) {
    if (sol.degenerate()) {
        throw DomainError("boundary derivatives are undefined for a degenerate solution");
    }
    const double K = params.K();
    const double a = sol.a_star;
    const double b = sol.b_star;
    const double width = b - a;
    const double psi_gap = psi(b) - psi(a);
    const double den_a = h2(p, params, a) * width;
    const double den_b = h2(p, params, b) * width;
    if (!(den_a != 0.0) || !(den_b != 0.0)) {
        throw SolverError("H'' vanishes at a stopping boundary");
    }
    BoundaryDerivatives d;
    d.dA_dK = 2.0 / (K * K) * (psi_gap - psi1(a) * width) / den_a;
    d.dB_dK = 2.0 / (K * K) * (psi_gap - psi1(b) * width) / den_b;
    return d;
}

std::vector<double> make_grid(double lo, double hi, std::size_t n, bool log_spacing) {
    if (n == 0) {
        throw ParameterError("grid needs at least one point");
    }
    if (log_spacing && !(lo > 0.0)) {
        throw ParameterError("log grid needs a positive lower end");
    }
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        g[i] = log_spacing ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                           : lo + t * (hi - lo);
    }
    g.back() = hi;
    return g;
}

std::vector<SweepRow> sweep(const Penalty& p, std::span<const double> K_grid, double tol,
                            std::size_t envelope_points) {
    for (std::size_t i = 1; i < K_grid.size(); ++i) {
        if (!(K_grid[i] > K_grid[i - 1])) {
            throw ParameterError("sweep: K grid must be strictly increasing");
        }
    }
    std::vector<SweepRow> rows(K_grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            rows[i] = solve_row(p, K_grid[i], tol, envelope_points);
        }
    };
    const std::size_t n_threads =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(rows.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }

    const SweepRow* prev = nullptr;
    for (auto& row : rows) {
        if (!row.a_star) {
            continue;
        }
        if (prev && (*row.a_star - *prev->a_star > kMonotoneResolution ||
                     *prev->b_star - *row.b_star > kMonotoneResolution)) {
            row.flagged = true;
            row.note += "boundaries not monotone in K";
        }
        prev = &row;
    }
    return rows;
}

LimitReport check_limits(const Penalty& p, double tol) {
    LimitReport r;
    r.threshold = p.beta() > 0.0 ? 1.0 / p.beta() : 0.0;
    const double pi0 = p.pi0();

    const auto large = solve_auto(p, ProblemParams::from_K(r.K_large), tol);
    if (!large.degenerate()) {
        r.a_large = large.a_star;
        r.b_large = large.b_star;
        r.large_K_passed = large.a_star < 0.01 && large.b_star > 0.99;
    }

    if (r.threshold > 0.0) {
        r.K_near = r.threshold * (1.0 + 1e-4);
        const auto near = solve_auto(p, ProblemParams::from_K(r.K_near), tol);
        if (!near.degenerate()) {
            r.a_near = near.a_star;
            r.b_near = near.b_star;
            r.near_threshold_passed =
                std::abs(near.a_star - pi0) < 0.05 && std::abs(near.b_star - pi0) < 0.05;
        }
    }
    return r;
}

BoundReport check_asymptotic_bounds(const Penalty& p, std::span<const double> K_grid,
                                    double epsilon, double tol) {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw ParameterError("asymptotic bound: epsilon must lie in [0, 1)");
    }
    if (epsilon == 0.0 && !p.symmetric()) {
        throw ParameterError("asymptotic bound: epsilon = 0 is only justified for symmetric penalties");
    }
    BoundReport r;
    r.epsilon = epsilon;
    const auto rows = sweep(p, K_grid, tol);

    std::size_t start = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].a_star && *rows[i].b_star - *rows[i].a_star > 0.9) {
            start = i;
            break;
        }
    }
    if (start == rows.size()) {
        return r;
    }
    r.conclusive = true;
    r.K0 = rows[start].K;
    const double growth0 = std::pow(r.K0, 1.0 - epsilon);
    const double a0 = *rows[start].a_star;
    const double b0 = *rows[start].b_star;
    const double c_from_a = (1.0 / a0 - 1.0) / growth0;
    const double c_from_b = b0 / ((1.0 - b0) * growth0);
    r.C = std::min(c_from_a, c_from_b);

    r.holds = true;
    constexpr double kRel = 1e-12;
    for (std::size_t i = start; i < rows.size(); ++i) {
        if (!rows[i].a_star) {
            r.holds = false;
            continue;
        }
        BoundRow b;
        b.K = rows[i].K;
        b.a_star = *rows[i].a_star;
        b.b_star = *rows[i].b_star;
        const double ck = r.C * std::pow(b.K, 1.0 - epsilon);
        b.a_bound = 1.0 / (1.0 + ck);
        b.b_bound = ck / (1.0 + ck);
        b.holds = b.a_star <= b.a_bound * (1.0 + kRel) && b.b_star >= b.b_bound * (1.0 - kRel);
        r.holds = r.holds && b.holds;
        r.rows.push_back(b);
    }
    return r;
}

}  // namespace seqtest
