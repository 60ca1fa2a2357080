#pragma once

#include "nodaltop/locus.hpp"

#include <string>
#include <vector>

namespace nodaltop {

struct LinkingResult {
    int value = 0;
    double raw = 0.0;
    double residual = 0.0;
    std::string a_id;
    std::string b_id;
    std::string method = "gauss-sum";
    /// Non-empty when an open arc was closed by a far-field return path.
    std::string convention;
    std::vector<KPoint> closure_a;
    std::vector<KPoint> closure_b;
};

inline constexpr double kLinkingTolerance = 0.05;

/// Gauss linking number of two closed polylines in R^3 (each closes from its
/// last vertex back to the first), summed exactly per segment pair.
/// Throws InvariantError if the curves come closer than half a segment length.
LinkingResult linking_number(const std::vector<KPoint>& a, const std::vector<KPoint>& b);

/// Loops of a torus model. Both must be contractible; b is moved to the
/// lattice image closest to a. Throws UnsupportedError otherwise.
LinkingResult linking_number(const NodalLoop& a, const NodalLoop& b, bool periodic);

/// Far-field closure of an open arc: the arc followed by a rectangular return
/// path at distance `reach` from the arc's chord, resampled at the arc's
/// mean segment length.
std::vector<KPoint> close_arc_far_field(const OpenArc& arc, double reach);

/// Minimal distance between two closed polylines.
double polyline_separation(const std::vector<KPoint>& a, const std::vector<KPoint>& b);

}  // namespace nodaltop
