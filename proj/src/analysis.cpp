#include "seqtest/analysis.hpp"

#include <cmath>

#include "seqtest/roots.hpp"

namespace seqtest {

ProblemParams::ProblemParams(double alpha, double sigma, double cost)
    : alpha_(alpha), sigma_(sigma), cost_(cost), K_(0.0) {
    if (!(alpha != 0.0) || !std::isfinite(alpha)) {
        throw ParameterError("alpha must be finite and nonzero");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ParameterError("sigma must be positive");
    }
    if (!(cost > 0.0) || !std::isfinite(cost)) {
        throw ParameterError("observation cost must be positive");
    }
    K_ = alpha * alpha / (cost * sigma * sigma);
}

ProblemParams ProblemParams::from_K(double K) {
    if (!(K > 0.0) || !std::isfinite(K)) {
        throw ParameterError("K must be positive");
    }
    ProblemParams params(std::sqrt(K), 1.0, 1.0);
    params.K_ = K;  // sqrt(K)^2 need not round-trip; keep the threshold exact
    return params;
}

double psi(double pi) {
    detail::require_open_unit(pi, "psi");
    return (1.0 - 2.0 * pi) * (std::log(pi) - std::log1p(-pi));
}

double psi1(double pi) {
    detail::require_open_unit(pi, "psi1");
    const double q = pi * (1.0 - pi);
    return -2.0 * (std::log(pi) - std::log1p(-pi)) + (1.0 - 2.0 * pi) / q;
}

double psi2(double pi) {
    detail::require_open_unit(pi, "psi2");
    const double q = pi * (1.0 - pi);
    return -1.0 / (q * q);
}

double h(const Penalty& p, const ProblemParams& params, double pi) {
    return p.value(pi) - 2.0 / params.K() * psi(pi);
}

double h1(const Penalty& p, const ProblemParams& params, double pi) {
    return p.d1(pi) - 2.0 / params.K() * psi1(pi);
}

double h2(const Penalty& p, const ProblemParams& params, double pi) {
    return p.d2(pi) - 2.0 / params.K() * psi2(pi);
}

UBoundaries u_boundaries(const Penalty& p, const ProblemParams& params) {
    if (!p.smooth()) {
        throw UnsupportedError("u_boundaries needs a C2 penalty; '" + p.name() + "' is kinked");
    }
    const double level = -1.0 / params.K();
    const double pi0 = p.pi0();
    if (p.generator(pi0) >= level) {
        return {};
    }
    auto f = [&](double x) { return p.generator(x) - level; };
    constexpr double kTol = 1e-12;
    UBoundaries u;
    u.nonempty = true;
    u.pi_star_lo = roots::bisect_root(f, kDomainClip, pi0, kTol);
    u.pi_star_hi = roots::bisect_root(f, pi0, 1.0 - kDomainClip, kTol);
    return u;
}

}  // namespace seqtest
