#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace seqtest {

using ScalarFn = std::function<double(double)>;

/**
 * Terminal penalty g(pi) induced by a soft-classification loss.
 *
 * Holds g, g', g'' on (0,1) together with the minimiser pi0 of the generator
 * image Ag(pi) = 1/2 pi^2 (1-pi)^2 g''(pi). Evaluating at pi <= 0 or pi >= 1
 * throws DomainError; the endpoint limits are available through
 * limit_at_zero() / limit_at_one().
 *
 * Immutable after construction.
 */
class Penalty {
public:
    /**
     * User-defined smooth penalty. pi0 is located by golden-section
     * minimisation of Ag on [1e-6, 1 - 1e-6].
     */
    static Penalty custom(std::string name, ScalarFn g, ScalarFn g1, ScalarFn g2,
                          bool symmetric = false);

    double value(double pi) const;
    double d1(double pi) const;
    double d2(double pi) const;
    /// Ag(pi).
    double generator(double pi) const;

    double pi0() const { return pi0_; }
    /// max |Ag| over (0,1), attained at pi0.
    double beta() const { return beta_; }
    bool smooth() const { return smooth_; }
    bool symmetric() const { return symmetric_; }
    const std::string& name() const { return name_; }
    /// Location of the kink for the classic penalty.
    std::optional<double> kink() const { return kink_; }

    double limit_at_zero() const { return 0.0; }
    double limit_at_one() const { return 0.0; }

private:
    friend Penalty make_cross_entropy(double, double);
    friend Penalty make_l1();
    friend Penalty make_l2();
    friend Penalty make_classic(double, double);

    Penalty(std::string name, ScalarFn g, ScalarFn g1, ScalarFn g2, bool smooth, bool symmetric,
            std::optional<double> pi0, std::optional<double> kink);

    std::string name_;
    ScalarFn g_;
    ScalarFn g1_;
    ScalarFn g2_;
    bool smooth_;
    bool symmetric_;
    double pi0_;
    double beta_;
    std::optional<double> kink_;
};

/// g(pi) = -a1 pi log(pi) - a2 (1-pi) log(1-pi).
Penalty make_cross_entropy(double a1, double a2);
/// g(pi) = 2 pi (1-pi).
Penalty make_l1();
/// g(pi) = pi (1-pi).
Penalty make_l2();
/// Hard-classification penalty a1 pi ^ a2 (1-pi), kinked at a2/(a1+a2).
Penalty make_classic(double a1, double a2);

/// Parses "ce:a1,a2" | "l1" | "l2" | "classic:a1,a2". Throws ParameterError.
Penalty parse_penalty(std::string_view spec);

struct ValidationReport {
    bool passed = true;
    /// Name of the first failed check, empty on success.
    std::string failed_check;
    /// Grid point where the first violation was seen.
    std::optional<double> violation_at;
};

/**
 * Grid scan of concavity, nonnegativity, vanishing endpoint limits and strict
 * unimodality of Ag around pi0. Throws UnsupportedError for kinked penalties
 * and ParameterError for grid_size < 100.
 */
ValidationReport validate_assumptions(const Penalty& p, int grid_size);

}  // namespace seqtest
