#pragma once

#include <functional>

namespace seqtest::roots {

struct Bracket {
    double lo;
    double hi;
};

/**
 * Bisection for a sign change of f on [lo, hi].
 *
 * Stops once the bracket is no wider than tol * min(1, lo, 1 - hi), i.e.
 * tol is absolute in the middle of (0,1) and relative near its endpoints,
 * or when no representable midpoint is left. Throws SolverError when
 * f(lo) and f(hi) have the same strict sign.
 */
Bracket bisect(const std::function<double(double)>& f, double lo, double hi, double tol);

/// Midpoint of the final bisection bracket.
double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol);

/// Golden-section search for the minimiser of a unimodal f on [lo, hi].
double golden_section_min(const std::function<double(double)>& f, double lo, double hi, double tol);

}  // namespace seqtest::roots
