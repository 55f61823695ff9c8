#include "seqtest/solver.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "seqtest/errors.hpp"
#include "seqtest/roots.hpp"

namespace seqtest {

namespace {

// Smallest x (down to ~1e-300) with h'(x) < target; H' -> -inf at 0.
double left_edge_below(const std::function<double(double)>& hp, double target) {
    double x = kDomainClip;
    while (hp(x) >= target) {
        x *= 1e-6;
        if (x < 1e-290) {
            throw SolverError("cannot bracket H' near 0");
        }
    }
    return x;
}

// Largest x < 1 with h'(x) > target; H' -> +inf at 1.
double right_edge_above(const std::function<double(double)>& hp, double target) {
    double d = kDomainClip;
    while (hp(1.0 - d) <= target) {
        d *= 1e-2;
        if (1.0 - d >= 1.0) {
            throw SolverError("cannot bracket H' near 1");
        }
    }
    return 1.0 - d;
}

void finish(const Penalty& p, const ProblemParams& params, BoundarySolution& s) {
    const double ha = h(p, params, s.a_star);
    const double hb = h(p, params, s.b_star);
    const double ha1 = h1(p, params, s.a_star);
    const double hb1 = h1(p, params, s.b_star);
    s.kind = SolutionKind::TwoBoundary;
    // The chord rather than the tangent at A*, so V meets g at both ends.
    s.slope = (hb - ha) / (s.b_star - s.a_star);
    s.intercept = ha - s.a_star * s.slope;
    s.residual_slope = std::abs(ha1 - hb1);
    s.residual_secant = std::abs(hb - ha - ha1 * (s.b_star - s.a_star));
}

// pi_*, pi^*, pi_under, pi_over; kind stays Degenerate when U is empty.
BoundarySolution fences(const Penalty& p, const ProblemParams& params, double tol) {
    BoundarySolution s;
    const auto u = u_boundaries(p, params);
    if (!u.nonempty) {
        return s;
    }
    s.pi_star_lo = u.pi_star_lo;
    s.pi_star_hi = u.pi_star_hi;
    auto hp = [&](double x) { return h1(p, params, x); };
    const double at_hi = hp(s.pi_star_hi);
    const double at_lo = hp(s.pi_star_lo);
    s.pi_under = roots::bisect_root([&](double x) { return hp(x) - at_hi; },
                                    left_edge_below(hp, at_hi), s.pi_star_lo, tol);
    s.pi_over = roots::bisect_root([&](double x) { return hp(x) - at_lo; }, s.pi_star_hi,
                                   right_edge_above(hp, at_lo), tol);
    return s;
}

}  // namespace

const char* to_string(SolutionKind kind) {
    return kind == SolutionKind::Degenerate ? "degenerate" : "two_boundary";
}

const char* to_string(SolveMethod method) {
    switch (method) {
        case SolveMethod::Tangent:
            return "tangent";
        case SolveMethod::SymmetricTangent:
            return "symmetric_tangent";
        case SolveMethod::Envelope:
            return "envelope";
    }
    return "unknown";
}

double matching_point(const Penalty& p, const ProblemParams& params, const BoundarySolution& bracket,
                      double a, double tol) {
    const double target = h1(p, params, a);
    // H' is at its minimum at pi^* and back at H'(pi_*) at pi_over; bisection
    // noise in the fences can push the target just outside that range.
    if (target <= h1(p, params, bracket.pi_star_hi)) {
        return bracket.pi_star_hi;
    }
    if (target >= h1(p, params, bracket.pi_over)) {
        return bracket.pi_over;
    }
    return roots::bisect_root([&](double x) { return h1(p, params, x) - target; }, bracket.pi_star_hi,
                              bracket.pi_over, tol);
}

double secant_gap(const Penalty& p, const ProblemParams& params, const BoundarySolution& bracket,
                  double a, double tol) {
    const double b = matching_point(p, params, bracket, a, tol);
    return h(p, params, b) - h(p, params, a) - h1(p, params, a) * (b - a);
}

BoundarySolution solve(const Penalty& p, const ProblemParams& params, double tol) {
    if (!p.smooth()) {
        throw UnsupportedError("tangent solver needs a C2 penalty; use the envelope route for '" +
                               p.name() + "'");
    }
    if (!(tol >= 1e-14 && tol <= 1e-6)) {
        throw ParameterError("solve: tol must lie in [1e-14, 1e-6]");
    }

    BoundarySolution s = fences(p, params, tol);
    if (s.pi_star_lo == 0.0) {
        return s;
    }

    if (p.symmetric()) {
        s.method = SolveMethod::SymmetricTangent;
        s.a_star = roots::bisect_root([&](double x) { return h1(p, params, x); }, s.pi_under,
                                      s.pi_star_lo, tol);
        s.b_star = 1.0 - s.a_star;
        finish(p, params, s);
        return s;
    }

    s.method = SolveMethod::Tangent;
    auto gap = [&](double a) { return secant_gap(p, params, s, a, tol); };
    double lo = s.pi_under;
    double hi = s.pi_star_lo;
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            const double glo = gap(lo);
            const double ghi = gap(hi);
            if ((glo > 0.0) != (ghi > 0.0) || glo == 0.0 || ghi == 0.0) {
                s.a_star = roots::bisect_root(gap, lo, hi, tol);
                s.b_star = matching_point(p, params, s, s.a_star, tol);
                finish(p, params, s);
                return s;
            }
            std::ostringstream diag;
            diag << "S(A) has no sign change on [" << lo << ", " << hi << "]: S = " << glo << ", "
                 << ghi << "; ";
            s.diagnostics += diag.str();
        } catch (const SolverError& err) {
            s.diagnostics += std::string(err.what()) + "; ";
            break;
        }
        // Ties at the bracket ends: widen once.
        lo = std::max(lo - 1e-10, 0.5 * lo);
        hi = std::min(hi + 1e-10, 0.5 * (hi + s.pi_star_hi));
    }

    BoundarySolution env = solve_via_envelope(p, params);
    env.fallback = true;
    env.diagnostics = s.diagnostics + "fell back to envelope";
    return env;
}

BoundarySolution solve_via_envelope(const Penalty& p, const ProblemParams& params, std::size_t n) {
    const auto e = convex_envelope(p, params, n);
    const auto c = boundaries_from_envelope(e);
    BoundarySolution s;
    s.method = SolveMethod::Envelope;
    if (c.status == EnvelopeStatus::Degenerate) {
        return s;
    }
    if (c.status == EnvelopeStatus::MultiRegion) {
        throw SolverError("convex envelope of H has several affine segments for '" + p.name() +
                          "'; disconnected continuation regions are not supported");
    }
    s.a_star = c.left;
    s.b_star = c.right;
    if (p.smooth()) {
        const auto f = fences(p, params, kDefaultTol);
        s.pi_star_lo = f.pi_star_lo;
        s.pi_star_hi = f.pi_star_hi;
        s.pi_under = f.pi_under;
        s.pi_over = f.pi_over;
    } else {
        const double k = p.kink().value_or(p.pi0());
        s.pi_star_lo = k;
        s.pi_star_hi = k;
        s.pi_under = s.a_star;
        s.pi_over = s.b_star;
    }
    s.kind = SolutionKind::TwoBoundary;
    const double ha = h(p, params, s.a_star);
    const double hb = h(p, params, s.b_star);
    // Chord through the contacts keeps V continuous at both boundaries.
    s.slope = (hb - ha) / (s.b_star - s.a_star);
    s.intercept = ha - s.a_star * s.slope;
    s.residual_slope = std::abs(h1(p, params, s.a_star) - h1(p, params, s.b_star));
    s.residual_secant = std::abs(hb - ha - h1(p, params, s.a_star) * (s.b_star - s.a_star));
    return s;
}

BoundarySolution solve_auto(const Penalty& p, const ProblemParams& params, double tol,
                            std::size_t envelope_points) {
    if (p.smooth()) {
        return solve(p, params, tol);
    }
    return solve_via_envelope(p, params, envelope_points);
}

ValueFunction::ValueFunction(BoundarySolution solution, Penalty penalty, ProblemParams params)
    : solution_(std::move(solution)), penalty_(std::move(penalty)), params_(params) {}

double value_at(const ValueFunction& v, double pi) {
    detail::require_open_unit(pi, "value_at");
    const auto& s = v.solution();
    if (s.degenerate() || pi <= s.a_star || pi >= s.b_star) {
        return v.penalty().value(pi);
    }
    return 2.0 / v.params().K() * psi(pi) + s.slope * pi + s.intercept;
}

StopDecision optimal_stop_decision(const ValueFunction& v, double pi) {
    detail::require_open_unit(pi, "optimal_stop_decision");
    const auto& s = v.solution();
    if (!s.degenerate() && pi > s.a_star && pi < s.b_star) {
        return StopDecision::Continue;
    }
    return StopDecision::Stop;
}

}  // namespace seqtest
