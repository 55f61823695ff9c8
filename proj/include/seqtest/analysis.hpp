#pragma once

#include <sstream>

#include "seqtest/errors.hpp"
#include "seqtest/penalty.hpp"

namespace seqtest {

/// Signal level alpha, noise sigma and observation cost c; K = alpha^2 / (c sigma^2).
class ProblemParams {
public:
    ProblemParams(double alpha, double sigma, double cost);
    /// alpha = sqrt(K), sigma = 1, cost = 1.
    static ProblemParams from_K(double K);

    double alpha() const { return alpha_; }
    double sigma() const { return sigma_; }
    double cost() const { return cost_; }
    double K() const { return K_; }

private:
    double alpha_;
    double sigma_;
    double cost_;
    double K_;
};

/// Grid scans are clipped to [kDomainClip, 1 - kDomainClip].
inline constexpr double kDomainClip = 1e-12;

namespace detail {
inline void require_open_unit(double pi, const char* what) {
    if (!(pi > 0.0 && pi < 1.0)) {
        std::ostringstream msg;
        msg << what << ": pi = " << pi << " outside (0,1)";
        throw DomainError(msg.str());
    }
}
}  // namespace detail

/// (Af)(pi) = 1/2 pi^2 (1-pi)^2 f''(pi), given an evaluator for f''.
template <class SecondDerivative>
double apply_generator(const SecondDerivative& f2, double pi) {
    detail::require_open_unit(pi, "apply_generator");
    const double q = pi * (1.0 - pi);
    return 0.5 * q * q * f2(pi);
}

/// Psi(pi) = (1 - 2 pi) log(pi / (1 - pi)); satisfies A Psi = -1/2.
double psi(double pi);
double psi1(double pi);
/// Psi''(pi) = -1 / (pi (1-pi))^2.
double psi2(double pi);

/// H = g - 2 Psi / K and its derivatives. h1/h2 use g', g'' of the penalty.
double h(const Penalty& p, const ProblemParams& params, double pi);
double h1(const Penalty& p, const ProblemParams& params, double pi);
double h2(const Penalty& p, const ProblemParams& params, double pi);

/// Boundary points of U = {Ag < -1/K}.
struct UBoundaries {
    double pi_star_lo = 0.0;
    double pi_star_hi = 0.0;
    bool nonempty = false;
};

/**
 * Roots of Ag(pi) + 1/K on either side of pi0, by bisection to bracket
 * width 1e-12. Empty when Ag(pi0) >= -1/K. Throws UnsupportedError for
 * kinked penalties and SolverError if a side cannot be bracketed.
 */
UBoundaries u_boundaries(const Penalty& p, const ProblemParams& params);

}  // namespace seqtest
