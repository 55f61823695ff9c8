// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "seqtest/analysis.hpp"
#include "seqtest/envelope.hpp"
#include "seqtest/montecarlo.hpp"
#include "seqtest/penalty.hpp"
#include "seqtest/sensitivity.hpp"
#include "seqtest/solver.hpp"

using namespace seqtest;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

Outcome threshold_reproduction() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& p : {make_cross_entropy(1, 1), make_l1()}) {
        for (double K : {0.5, 2.0, 4.0, 6.0, 7.9, 7.999, 8.0}) {
            if (!solve(p, ProblemParams::from_K(K)).degenerate()) {
                o.passed = false;
                o.detail += p.name() + " not degenerate at K=" + fmt(K) + "; ";
            }
        }
        if (solve(p, ProblemParams::from_K(8.01)).kind != SolutionKind::TwoBoundary) {
            o.passed = false;
            o.detail += p.name() + " degenerate at K=8.01; ";
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.passed = o.passed && secs < 1.0;
    o.detail += "runtime " + fmt(secs) + " s (limit 1 s)";
    return o;
}

Outcome closed_forms() {
    Outcome o;
    double worst = 0.0;
    for (double K : {10.0, 16.0, 50.0, 100.0}) {
        const auto params = ProblemParams::from_K(K);
        // Cross-entropy: pi(1-pi) = 2/K.  L1: pi^2 (1-pi)^2 = 1/(2K).
        const double r_ce = std::sqrt(1.0 - 8.0 / K);
        const double r_l1 = std::sqrt(1.0 - 4.0 * std::sqrt(1.0 / (2.0 * K)));
        const double ce_lo = 0.5 * (1.0 - r_ce), ce_hi = 0.5 * (1.0 + r_ce);
        const double l1_lo = 0.5 * (1.0 - r_l1), l1_hi = 0.5 * (1.0 + r_l1);
        const auto ce = u_boundaries(make_cross_entropy(1, 1), params);
        const auto l1 = u_boundaries(make_l1(), params);
        worst = std::max({worst, std::abs(ce.pi_star_lo - ce_lo), std::abs(ce.pi_star_hi - ce_hi),
                          std::abs(l1.pi_star_lo - l1_lo), std::abs(l1.pi_star_hi - l1_hi)});
    }
    o.passed = worst <= 1e-8;
    o.detail = "max abs error " + fmt(worst) + " (limit 1e-8)";
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (const auto& p : {make_cross_entropy(1, 1), make_l1()}) {
        for (double K : {10.0, 16.0, 50.0, 200.0}) {
            const auto params = ProblemParams::from_K(K);
            const auto s = solve(p, params);
            const auto env = convex_envelope(p, params, kEnvelopeOraclePoints);
            const auto c = boundaries_from_envelope(env);
            if (c.status != EnvelopeStatus::TwoBoundary || s.degenerate()) {
                o.passed = false;
                o.detail += p.name() + " K=" + fmt(K) + " not two-boundary; ";
                continue;
            }
            worst = std::max({worst, std::abs(s.a_star - c.left), std::abs(s.b_star - c.right)});
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.passed = o.passed && worst <= 5e-6 && secs < 30.0;
    o.detail += "max |solver - envelope| " + fmt(worst) + " (limit 5e-6), runtime " + fmt(secs) +
                " s (limit 30 s)";
    return o;
}

// Second-order one-sided difference, h > 0 looks right and h < 0 looks left.
double one_sided(const std::function<double(double)>& f, double x, double h) {
    return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h);
}

Outcome free_boundary_residuals() {
    Outcome o;
    double fit = 0.0;
    double pde = 0.0;
    bool strict = true;
    bool outside = true;
    for (const auto& p : {make_cross_entropy(1, 1), make_l1()}) {
        for (double K : {10.0, 16.0, 50.0}) {
            const auto params = ProblemParams::from_K(K);
            const ValueFunction v(solve(p, params), p, params);
            const auto& s = v.solution();
            const auto V = [&v](double x) { return value_at(v, x); };
            const double d = 1e-6;
            for (double edge : {s.a_star, s.b_star}) {
                fit = std::max({fit, std::abs(one_sided(V, edge, d) - p.d1(edge)),
                                std::abs(one_sided(V, edge, -d) - p.d1(edge))});
            }
            for (int i = 0; i < 1000; ++i) {
                const double x = s.a_star + (s.b_star - s.a_star) * (i + 0.5) / 1000.0;
                const double step =
                    std::min(1e-3 * x * (1.0 - x), 0.25 * std::min(x - s.a_star, s.b_star - x));
                const double second = (V(x + step) - 2.0 * V(x) + V(x - step)) / (step * step);
                const double q = x * (1.0 - x);
                pde = std::max(pde, std::abs(0.5 * q * q * second + 1.0 / K));
                strict = strict && V(x) < p.value(x);
            }
            for (int i = 1; i < 200; ++i) {
                const double x = i / 200.0;
                if (x <= s.a_star || x >= s.b_star) {
                    outside = outside && V(x) == p.value(x);
                }
            }
            outside = outside && V(s.a_star) == p.value(s.a_star) && V(s.b_star) == p.value(s.b_star);
        }
    }
    o.passed = fit <= 1e-6 && pde <= 1e-6 && strict && outside;
    o.detail = "smooth fit " + fmt(fit) + ", interior equation " + fmt(pde) +
               " (limits 1e-6), V<g inside " + (strict ? "yes" : "NO") + ", V=g outside " +
               (outside ? "yes" : "NO");
    return o;
}

Outcome sensitivity_formulas() {
    Outcome o;
    double worst = 0.0;
    for (const auto& p : {make_cross_entropy(1, 1), make_l1()}) {
        for (double K : {10.0, 16.0, 50.0}) {
            const auto params = ProblemParams::from_K(K);
            const auto d = boundary_derivatives(p, params, solve(p, params));
            const double h = 1e-4 * K;
            const auto lo = solve(p, ProblemParams::from_K(K - h));
            const auto hi = solve(p, ProblemParams::from_K(K + h));
            const double fa = (hi.a_star - lo.a_star) / (2.0 * h);
            const double fb = (hi.b_star - lo.b_star) / (2.0 * h);
            worst = std::max({worst, std::abs(d.dA_dK - fa) / std::abs(fa),
                              std::abs(d.dB_dK - fb) / std::abs(fb)});
        }
    }
    std::size_t checked = 0;
    bool signs = true;
    const auto grid = make_grid(8.01, 1e4, 200, true);
    for (const auto& p : {make_cross_entropy(1, 1), make_l1()}) {
        for (const auto& r : sweep(p, grid)) {
            if (r.degenerate) {
                signs = false;
                continue;
            }
            ++checked;
            signs = signs && *r.dA_dK < 0.0 && *r.dB_dK > 0.0;
        }
    }
    o.passed = worst <= 1e-4 && signs;
    o.detail = "max relative error " + fmt(worst) + " (limit 1e-4), dA/dK < 0 < dB/dK at " +
               std::to_string(checked) + " sweep points: " + (signs ? "yes" : "NO");
    return o;
}

Outcome limits_and_bounds() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    std::ostringstream msg;
    const auto grid = make_grid(50.0, 1e4, 60, true);
    for (const auto& p : {make_cross_entropy(1, 1), make_l1()}) {
        const auto lim = check_limits(p);
        const auto b = check_asymptotic_bounds(p, grid, 0.0);
        o.passed = o.passed && lim.passed() && b.conclusive && b.holds;
        msg << p.name() << ": A(1e6)=" << fmt(*lim.a_large) << " 1-B(1e6)=" << fmt(1.0 - *lim.b_large)
            << ", near threshold |A-pi0|=" << fmt(std::abs(*lim.a_near - p.pi0()))
            << " |B-pi0|=" << fmt(std::abs(*lim.b_near - p.pi0())) << ", bounds C=" << fmt(b.C)
            << (b.holds ? " hold" : " FAIL") << "; ";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.passed = o.passed && secs < 60.0;
    o.detail = msg.str() + "runtime " + fmt(secs) + " s (limit 60 s)";
    return o;
}

Outcome monte_carlo() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    const auto p = make_cross_entropy(1, 1);
    const auto params = ProblemParams::from_K(16);
    const auto s = solve(p, params);
    const double v = value_at(ValueFunction(s, p, params), 0.5);
    SimConfig cfg;
    cfg.prior = 0.5;
    cfg.n_paths = 100'000;
    cfg.dt = 1e-4;
    cfg.t_max = default_t_max(params);
    cfg.seed = 20240601;
    const auto opt = estimate_risk(params, p, s.a_star, s.b_star, cfg);
    // Discrete monitoring lets Pi overshoot the boundary by about mean_overshoot.
    // Smooth fit makes the first-order loss vanish, leaving a curvature term.
    const double allowance =
        std::max(h2(p, params, s.a_star), h2(p, params, s.b_star)) * opt.mean_overshoot * opt.mean_overshoot;
    const double gap = std::abs(opt.mean_risk - v);
    const bool centred = gap <= 3.0 * opt.std_error + allowance && !opt.unreliable;

    std::ostringstream msg;
    msg << "risk " << opt.mean_risk << " vs V(0.5) " << v << ", |diff| " << fmt(gap) << " <= 3 SE "
        << fmt(3.0 * opt.std_error) << " + allowance " << fmt(allowance) << ": "
        << (centred ? "yes" : "NO") << "; perturbations";
    bool dominated = true;
    const double d = 0.05;
    const std::pair<double, double> variants[] = {{s.a_star - d, s.b_star}, {s.a_star + d, s.b_star},
                                                  {s.a_star, s.b_star - d}, {s.a_star, s.b_star + d},
                                                  {s.a_star - d, s.b_star + d}};
    for (const auto& [a, b] : variants) {
        const auto r = estimate_risk(params, p, a, b, cfg);
        const double se = std::hypot(r.std_error, opt.std_error);
        const bool ok = r.mean_risk >= opt.mean_risk - 3.0 * se;
        dominated = dominated && ok;
        msg << " " << fmt(r.mean_risk - opt.mean_risk) << (ok ? "" : "(FAIL)");
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.passed = centred && dominated && secs < 300.0;
    msg << " above optimal; runtime " << fmt(secs) << " s (limit 300 s)";
    o.detail = msg.str();
    return o;
}

Outcome figure_ordering() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    const auto grid = make_grid(8.05, 100.0, 60, false);
    const auto ce = sweep(make_cross_entropy(1, 1), grid);
    const auto l1 = sweep(make_l1(), grid);
    const auto cl = sweep(make_classic(1, 1), grid);
    bool nested = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        nested = nested && !ce[i].degenerate && !l1[i].degenerate && *ce[i].a_star < *l1[i].a_star &&
                 *l1[i].b_star < *ce[i].b_star;
    }
    // +1: classic contains the soft interval, -1: contained in it, 0: neither.
    auto relation = [](const SweepRow& hard, const SweepRow& soft) {
        if (*hard.a_star < *soft.a_star && *hard.b_star > *soft.b_star) {
            return 1;
        }
        if (*hard.a_star > *soft.a_star && *hard.b_star < *soft.b_star) {
            return -1;
        }
        return 0;
    };
    const int first = relation(cl.front(), ce.front());
    const int last = relation(cl.back(), ce.back());
    std::size_t switches = 0;
    double switch_K = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (relation(cl[i], ce[i]) != relation(cl[i - 1], ce[i - 1])) {
            ++switches;
            switch_K = grid[i];
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.passed = nested && first == 1 && last == -1 && switches == 1 && secs < 60.0;
    o.detail = std::string("L1 inside cross-entropy at all ") + std::to_string(grid.size()) +
               " K: " + (nested ? "yes" : "NO") + "; classic contains soft at K=" + fmt(grid.front()) +
               ": " + (first == 1 ? "yes" : "NO") + ", contained at K=" + fmt(grid.back()) + ": " +
               (last == -1 ? "yes" : "NO") + ", single switch near K=" + fmt(switch_K) + ": " +
               (switches == 1 ? "yes" : "NO") + "; runtime " + fmt(secs) + " s (limit 60 s)";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* title;
        Outcome (*check)();
    };
    const Criterion criteria[] = {
        {"AC1", "threshold reproduction", threshold_reproduction},
        {"AC2", "closed-form U boundaries", closed_forms},
        {"AC3", "solver vs convex envelope", oracle_equivalence},
        {"AC4", "free-boundary residuals", free_boundary_residuals},
        {"AC5", "sensitivity formulas", sensitivity_formulas},
        {"AC6", "limits and bounds", limits_and_bounds},
        {"AC7", "Monte Carlo risk", monte_carlo},
        {"AC8", "boundary ordering across K", figure_ordering},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.passed ? 0 : 1;
        std::printf("%s %s  %s: %s\n", c.id, o.passed ? "PASS" : "FAIL", c.title, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
