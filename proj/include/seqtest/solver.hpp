#pragma once

#include <cstddef>
#include <string>

#include "seqtest/analysis.hpp"
#include "seqtest/envelope.hpp"
#include "seqtest/penalty.hpp"

namespace seqtest {

enum class SolutionKind { Degenerate, TwoBoundary };

enum class SolveMethod {
    Tangent,           ///< nested bisection on the tangent/secant system
    SymmetricTangent,  ///< H'(A) = 0 and B = 1 - A
    Envelope,          ///< contacts of the convex envelope of H
};

const char* to_string(SolutionKind kind);
const char* to_string(SolveMethod method);

/**
 * Optimal stopping boundaries. The continuation region is (a_star, b_star).
 *
 * For a two-boundary solution 0 < pi_under <= a_star < pi_star_lo <
 * pi_star_hi < b_star <= pi_over < 1, and slope * pi + intercept is the
 * chord of H through a_star and b_star, which is the common tangent up to
 * residual_slope. Degenerate solutions leave the numeric fields at zero.
 */
struct BoundarySolution {
    SolutionKind kind = SolutionKind::Degenerate;
    SolveMethod method = SolveMethod::Tangent;
    double a_star = 0.0;
    double b_star = 0.0;
    double pi_star_lo = 0.0;
    double pi_star_hi = 0.0;
    double pi_under = 0.0;
    double pi_over = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    /// |H'(A) - H'(B)| and |H(B) - H(A) - H'(A)(B - A)|.
    double residual_slope = 0.0;
    double residual_secant = 0.0;
    /// Tangent solve failed and the envelope answer was used instead.
    bool fallback = false;
    std::string diagnostics;

    bool degenerate() const { return kind == SolutionKind::Degenerate; }
};

inline constexpr double kDefaultTol = 1e-12;
inline constexpr double kResidualTol = 1e-10;

/**
 * Boundaries for a C2 penalty. Throws UnsupportedError for kinked penalties
 * and ParameterError for tol outside [1e-14, 1e-6].
 */
BoundarySolution solve(const Penalty& p, const ProblemParams& params, double tol = kDefaultTol);

/// Boundaries read off the convex envelope of H; the only route for kinked penalties.
BoundarySolution solve_via_envelope(const Penalty& p, const ProblemParams& params,
                                    std::size_t n = kEnvelopeOraclePoints);

/// solve() for smooth penalties, solve_via_envelope() otherwise.
BoundarySolution solve_auto(const Penalty& p, const ProblemParams& params, double tol = kDefaultTol,
                            std::size_t envelope_points = kEnvelopeOraclePoints);

/// B(A): the point in [pi^*, pi_over] where H' equals H'(A).
double matching_point(const Penalty& p, const ProblemParams& params, const BoundarySolution& bracket,
                      double a, double tol = kDefaultTol);

/// S(A) = H(B(A)) - H(A) - H'(A) (B(A) - A); zero at A*.
double secant_gap(const Penalty& p, const ProblemParams& params, const BoundarySolution& bracket,
                  double a, double tol = kDefaultTol);

/// V(pi): g outside (A*, B*), 2 Psi / K + slope pi + intercept inside.
class ValueFunction {
public:
    ValueFunction(BoundarySolution solution, Penalty penalty, ProblemParams params);

    const BoundarySolution& solution() const { return solution_; }
    const Penalty& penalty() const { return penalty_; }
    const ProblemParams& params() const { return params_; }

private:
    BoundarySolution solution_;
    Penalty penalty_;
    ProblemParams params_;
};

double value_at(const ValueFunction& v, double pi);

enum class StopDecision { Stop, Continue };

StopDecision optimal_stop_decision(const ValueFunction& v, double pi);

}  // namespace seqtest
