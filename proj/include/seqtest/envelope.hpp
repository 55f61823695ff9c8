#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "seqtest/analysis.hpp"
#include "seqtest/penalty.hpp"

namespace seqtest {

/// A maximal run of the lower hull lying strictly below the sampled function.
struct AffineSegment {
    std::size_t left_index = 0;
    std::size_t right_index = 0;
    double left = 0.0;
    double right = 0.0;
    double slope = 0.0;
};

struct EnvelopeResult {
    std::vector<double> grid;
    std::vector<double> values;           ///< sampled function (H for convex_envelope)
    std::vector<double> envelope_values;  ///< largest convex minorant at the grid points
    std::vector<AffineSegment> affine_segments;
    /// Set by convex_envelope so contacts can be refined against H'.
    std::optional<Penalty> penalty;
    std::optional<ProblemParams> params;
};

/// Default grid sizes: tests use 1e5 points, oracle runs 1e6.
inline constexpr std::size_t kEnvelopeTestPoints = 100'000;
inline constexpr std::size_t kEnvelopeOraclePoints = 1'000'000;
/// Grid is uniform on [kEnvelopeEdge, 1 - kEnvelopeEdge]; H diverges at 0 and 1.
inline constexpr double kEnvelopeEdge = 1e-9;

/**
 * Lower convex hull (monotone chain) of points with strictly increasing x.
 * A run of skipped grid points becomes an affine segment only when the
 * function rises above the chord by more than gap_tol somewhere inside it.
 */
EnvelopeResult lower_convex_envelope(std::span<const double> x, std::span<const double> y,
                                     double gap_tol);

/**
 * Convex envelope of H = g - 2 Psi / K sampled on n uniform points (plus the
 * kink of a classic penalty, inserted exactly). Works for kinked penalties.
 * Throws ParameterError for n < 1000.
 */
EnvelopeResult convex_envelope(const Penalty& p, const ProblemParams& params,
                               std::size_t n = kEnvelopeTestPoints);

enum class EnvelopeStatus { Degenerate, TwoBoundary, MultiRegion };

struct EnvelopeBoundaries {
    EnvelopeStatus status = EnvelopeStatus::Degenerate;
    double left = 0.0;
    double right = 0.0;
    double slope = 0.0;
    bool refined = false;
};

/**
 * Contacts of the single affine segment. When the envelope carries its
 * penalty, each contact is refined by bisection on H' - slope within two
 * grid cells (skipped if that window has no sign change or straddles a kink).
 * Zero segments report Degenerate, more than one MultiRegion.
 */
EnvelopeBoundaries boundaries_from_envelope(const EnvelopeResult& e);

}  // namespace seqtest
