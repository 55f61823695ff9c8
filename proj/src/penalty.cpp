#include "seqtest/penalty.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "seqtest/analysis.hpp"
#include "seqtest/errors.hpp"
#include "seqtest/roots.hpp"

namespace seqtest {

namespace {

constexpr double kPi0SearchLo = 1e-6;
constexpr double kPi0SearchHi = 1.0 - 1e-6;
constexpr double kPi0Tol = 1e-10;

void check_open_unit(double pi) {
    if (!(pi > 0.0 && pi < 1.0)) {
        std::ostringstream msg;
        msg << "penalty evaluated outside (0,1): pi = " << pi;
        throw DomainError(msg.str());
    }
}

double parse_number(std::string_view text, std::string_view whole) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw ParameterError("cannot parse number '" + std::string(text) + "' in penalty '" +
                             std::string(whole) + "'");
    }
    return v;
}

std::pair<double, double> parse_weights(std::string_view args, std::string_view whole) {
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) {
        throw ParameterError("expected 'a1,a2' in penalty '" + std::string(whole) + "'");
    }
    return {parse_number(args.substr(0, comma), whole), parse_number(args.substr(comma + 1), whole)};
}

}  // namespace

Penalty::Penalty(std::string name, ScalarFn g, ScalarFn g1, ScalarFn g2, bool smooth, bool symmetric,
                 std::optional<double> pi0, std::optional<double> kink)
    : name_(std::move(name)),
      g_(std::move(g)),
      g1_(std::move(g1)),
      g2_(std::move(g2)),
      smooth_(smooth),
      symmetric_(symmetric),
      pi0_(0.5),
      beta_(0.0),
      kink_(kink) {
    if (pi0) {
        pi0_ = *pi0;
    } else {
        pi0_ = roots::golden_section_min([this](double x) { return generator(x); }, kPi0SearchLo,
                                         kPi0SearchHi, kPi0Tol);
    }
    beta_ = std::abs(generator(pi0_));
}

Penalty Penalty::custom(std::string name, ScalarFn g, ScalarFn g1, ScalarFn g2, bool symmetric) {
    return Penalty(std::move(name), std::move(g), std::move(g1), std::move(g2), true, symmetric,
                   std::nullopt, std::nullopt);
}

double Penalty::value(double pi) const {
    check_open_unit(pi);
    return g_(pi);
}

double Penalty::d1(double pi) const {
    check_open_unit(pi);
    return g1_(pi);
}

double Penalty::d2(double pi) const {
    check_open_unit(pi);
    return g2_(pi);
}

double Penalty::generator(double pi) const {
    return apply_generator(g2_, pi);
}

Penalty make_cross_entropy(double a1, double a2) {
    if (!(a1 > 0.0) || !(a2 > 0.0)) {
        throw ParameterError("cross-entropy weights must be positive");
    }
    std::ostringstream name;
    name << "ce:" << a1 << "," << a2;
    auto g = [a1, a2](double x) { return -a1 * x * std::log(x) - a2 * (1.0 - x) * std::log1p(-x); };
    auto g1 = [a1, a2](double x) {
        return -a1 * (std::log(x) + 1.0) + a2 * (std::log1p(-x) + 1.0);
    };
    auto g2 = [a1, a2](double x) { return -a1 / x - a2 / (1.0 - x); };
    const bool symmetric = (a1 == a2);
    // Ag = -pi (1-pi) (a1 (1-pi) + a2 pi) / 2 is extremal where
    // 3 (a1 - a2) pi^2 - 2 (2 a1 - a2) pi + a1 = 0.
    double pi0 = 0.5;
    if (!symmetric) {
        const double b = 2.0 * a1 - a2;
        const double q = b + std::copysign(std::sqrt(a1 * a1 - a1 * a2 + a2 * a2), b);
        const double r1 = q / (3.0 * (a1 - a2));
        pi0 = (r1 > 0.0 && r1 < 1.0) ? r1 : a1 / q;
    }
    return Penalty(name.str(), g, g1, g2, true, symmetric, pi0, std::nullopt);
}

Penalty make_l1() {
    return Penalty(
        "l1", [](double x) { return 2.0 * x * (1.0 - x); }, [](double x) { return 2.0 - 4.0 * x; },
        [](double) { return -4.0; }, true, true, 0.5, std::nullopt);
}

Penalty make_l2() {
    return Penalty(
        "l2", [](double x) { return x * (1.0 - x); }, [](double x) { return 1.0 - 2.0 * x; },
        [](double) { return -2.0; }, true, true, 0.5, std::nullopt);
}

Penalty make_classic(double a1, double a2) {
    if (!(a1 > 0.0) || !(a2 > 0.0)) {
        throw ParameterError("classic penalty weights must be positive");
    }
    const double kink = a2 / (a1 + a2);
    std::ostringstream name;
    name << "classic:" << a1 << "," << a2;
    auto g = [a1, a2](double x) { return std::min(a1 * x, a2 * (1.0 - x)); };
    // Left derivative at the kink itself.
    auto g1 = [a1, a2, kink](double x) { return x <= kink ? a1 : -a2; };
    auto g2 = [](double) { return 0.0; };
    return Penalty(name.str(), g, g1, g2, false, a1 == a2, kink, kink);
}

Penalty parse_penalty(std::string_view spec) {
    if (spec == "l1") {
        return make_l1();
    }
    if (spec == "l2") {
        return make_l2();
    }
    const auto colon = spec.find(':');
    if (colon != std::string_view::npos) {
        const auto kind = spec.substr(0, colon);
        const auto args = spec.substr(colon + 1);
        if (kind == "ce") {
            const auto [a1, a2] = parse_weights(args, spec);
            return make_cross_entropy(a1, a2);
        }
        if (kind == "classic") {
            const auto [a1, a2] = parse_weights(args, spec);
            return make_classic(a1, a2);
        }
    }
    throw ParameterError("unknown penalty '" + std::string(spec) +
                         "' (expected ce:a1,a2 | l1 | l2 | classic:a1,a2)");
}

ValidationReport validate_assumptions(const Penalty& p, int grid_size) {
    if (!p.smooth()) {
        throw UnsupportedError("assumption check needs a C2 penalty; '" + p.name() + "' is kinked");
    }
    if (grid_size < 100) {
        throw ParameterError("validate_assumptions: grid_size must be at least 100");
    }
    auto fail = [](std::string check, double at) {
        return ValidationReport{false, std::move(check), at};
    };

    const int n = grid_size;
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] = (i + 1.0) / (n + 1.0);
    }

    for (double x : grid) {
        if (p.value(x) < 0.0) {
            return fail("nonnegativity", x);
        }
        if (p.d2(x) > 0.0) {
            return fail("concavity", x);
        }
    }
    constexpr double kEdge = 1e-10;
    constexpr double kEdgeTol = 1e-6;
    if (std::abs(p.value(kEdge)) > kEdgeTol) {
        return fail("limit at 0", kEdge);
    }
    if (std::abs(p.value(1.0 - kEdge)) > kEdgeTol) {
        return fail("limit at 1", 1.0 - kEdge);
    }

    const double pi0 = p.pi0();
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double x0 = grid[i - 1];
        const double x1 = grid[i];
        const double a0 = p.generator(x0);
        const double a1 = p.generator(x1);
        if (x1 <= pi0 && !(a1 < a0)) {
            return fail("Ag strictly decreasing below pi0", x1);
        }
        if (x0 >= pi0 && !(a1 > a0)) {
            return fail("Ag strictly increasing above pi0", x1);
        }
    }
    return {};
}

}  // namespace seqtest
