#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqtest/analysis.hpp"
#include "seqtest/penalty.hpp"
#include "seqtest/solver.hpp"

namespace seqtest {

struct BoundaryDerivatives {
    double dA_dK = 0.0;
    double dB_dK = 0.0;
};

/**
 * Boundary slopes dA/dK and dB/dK from the implicit-function closed forms
 *
 *   dA/dK = (2/K^2) [Psi(B) - Psi(A) - Psi'(A)(B - A)] / (H''(A) (B - A))
 *
 * and the same with Psi'(B), H''(B) for B. Throws DomainError for a
 * degenerate solution and SolverError if H'' vanishes at a boundary.
 */
BoundaryDerivatives boundary_derivatives(const Penalty& p, const ProblemParams& params,
                                         const BoundarySolution& sol);

struct SweepRow {
    double K = 0.0;
    std::optional<double> a_star;
    std::optional<double> b_star;
    std::optional<double> pi_star_lo;
    std::optional<double> pi_star_hi;
    std::optional<double> dA_dK;
    std::optional<double> dB_dK;
    bool degenerate = false;
    /// Solver failure or a monotonicity break against the previous present row.
    bool flagged = false;
    std::string note;
    SolveMethod method = SolveMethod::Tangent;
};

/**
 * One row per K (strictly increasing grid). Kinked penalties go through the
 * envelope with envelope_points samples; pi_star fields stay empty for them.
 * Rows are computed concurrently and returned in grid order.
 */
std::vector<SweepRow> sweep(const Penalty& p, std::span<const double> K_grid,
                            double tol = kDefaultTol,
                            std::size_t envelope_points = kEnvelopeTestPoints);

/// n points from lo to hi, log-spaced if log_spacing.
std::vector<double> make_grid(double lo, double hi, std::size_t n, bool log_spacing);

struct LimitReport {
    double threshold = 0.0;  ///< 1 / beta
    double K_large = 1e6;
    std::optional<double> a_large;
    std::optional<double> b_large;
    bool large_K_passed = false;
    double K_near = 0.0;
    std::optional<double> a_near;
    std::optional<double> b_near;
    bool near_threshold_passed = false;

    bool passed() const { return large_K_passed && near_threshold_passed; }
};

/**
 * A*(1e6) < 0.01 and B*(1e6) > 0.99; at K = (1/beta)(1 + 1e-4) both
 * boundaries within 0.05 of pi0.
 */
LimitReport check_limits(const Penalty& p, double tol = kDefaultTol);

struct BoundRow {
    double K = 0.0;
    double a_star = 0.0;
    double b_star = 0.0;
    double a_bound = 0.0;  ///< 1 / (1 + C K^(1-eps))
    double b_bound = 0.0;  ///< C K^(1-eps) / (1 + C K^(1-eps))
    bool holds = false;
};

struct BoundReport {
    bool conclusive = false;
    double K0 = 0.0;
    double C = 0.0;
    double epsilon = 0.0;
    std::vector<BoundRow> rows;  ///< grid points above K0
    bool holds = false;
};

/**
 * Calibrates C so the bound is tight at K0, the smallest grid K with
 * B* - A* > 0.9, and checks A* <= 1/(1 + C K^(1-eps)) and
 * B* >= C K^(1-eps)/(1 + C K^(1-eps)) at every larger grid K. When A and B
 * imply different constants the smaller one is used, so both hold at K0.
 */
BoundReport check_asymptotic_bounds(const Penalty& p, std::span<const double> K_grid,
                                    double epsilon, double tol = kDefaultTol);

}  // namespace seqtest
