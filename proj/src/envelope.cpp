#include "seqtest/envelope.hpp"

#include <algorithm>
#include <cmath>

#include "seqtest/errors.hpp"
#include "seqtest/roots.hpp"

namespace seqtest {

namespace {

// z-component of (a - o) x (b - o); > 0 for a left turn.
long double cross(double ox, double oy, double ax, double ay, double bx, double by) {
    return static_cast<long double>(ax - ox) * static_cast<long double>(by - oy) -
           static_cast<long double>(ay - oy) * static_cast<long double>(bx - ox);
}

}  // namespace

EnvelopeResult lower_convex_envelope(std::span<const double> x, std::span<const double> y,
                                     double gap_tol) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ParameterError("lower_convex_envelope: need at least two (x, y) pairs");
    }
    EnvelopeResult r;
    r.grid.assign(x.begin(), x.end());
    r.values.assign(y.begin(), y.end());
    const std::size_t n = x.size();

    std::vector<std::size_t> hull;
    hull.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        while (hull.size() >= 2) {
            const std::size_t o = hull[hull.size() - 2];
            const std::size_t a = hull[hull.size() - 1];
            if (cross(x[o], y[o], x[a], y[a], x[i], y[i]) > 0.0L) {
                break;
            }
            hull.pop_back();
        }
        hull.push_back(i);
    }

    r.envelope_values.resize(n);
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
        const std::size_t i = hull[k];
        const std::size_t j = hull[k + 1];
        const double slope = (y[j] - y[i]) / (x[j] - x[i]);
        r.envelope_values[i] = y[i];
        double max_gap = 0.0;
        for (std::size_t m = i + 1; m < j; ++m) {
            r.envelope_values[m] = y[i] + slope * (x[m] - x[i]);
            max_gap = std::max(max_gap, y[m] - r.envelope_values[m]);
        }
        if (j > i + 1 && max_gap > gap_tol) {
            r.affine_segments.push_back({i, j, x[i], x[j], slope});
        }
    }
    r.envelope_values[hull.back()] = y[hull.back()];
    return r;
}

EnvelopeResult convex_envelope(const Penalty& p, const ProblemParams& params, std::size_t n) {
    if (n < 1000) {
        throw ParameterError("convex_envelope: need at least 1000 grid points");
    }
    std::vector<double> x(n);
    const double span = 1.0 - 2.0 * kEnvelopeEdge;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = kEnvelopeEdge + span * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    if (const auto k = p.kink()) {
        const auto pos = std::lower_bound(x.begin(), x.end(), *k);
        if (pos == x.end() || *pos != *k) {
            x.insert(pos, *k);
        }
    }
    std::vector<double> y(x.size());
    double scale = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = h(p, params, x[i]);
        scale = std::max(scale, std::abs(y[i]));
    }
    auto r = lower_convex_envelope(x, y, 1e-12 * scale);
    r.penalty = p;
    r.params = params;
    return r;
}

EnvelopeBoundaries boundaries_from_envelope(const EnvelopeResult& e) {
    EnvelopeBoundaries out;
    if (e.affine_segments.empty()) {
        out.status = EnvelopeStatus::Degenerate;
        return out;
    }
    if (e.affine_segments.size() > 1) {
        out.status = EnvelopeStatus::MultiRegion;
        return out;
    }
    const auto& seg = e.affine_segments.front();
    out.status = EnvelopeStatus::TwoBoundary;
    out.left = seg.left;
    out.right = seg.right;
    out.slope = seg.slope;
    if (!e.penalty || !e.params) {
        return out;
    }

    const Penalty& p = *e.penalty;
    const ProblemParams& params = *e.params;
    const auto& x = e.grid;
    auto refine = [&](std::size_t idx, double& contact) {
        const double lo = x[idx >= 2 ? idx - 2 : 0];
        const double hi = x[std::min(idx + 2, x.size() - 1)];
        if (const auto k = p.kink(); k && *k >= lo && *k <= hi) {
            return false;
        }
        auto f = [&](double t) { return h1(p, params, t) - seg.slope; };
        if ((f(lo) > 0.0) == (f(hi) > 0.0)) {
            return false;
        }
        contact = roots::bisect_root(f, lo, hi, 1e-15);
        return true;
    };
    const bool left_ok = refine(seg.left_index, out.left);
    const bool right_ok = refine(seg.right_index, out.right);
    out.refined = left_ok && right_ok;
    return out;
}

}  // namespace seqtest
