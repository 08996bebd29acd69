#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "corner/manifolds.hpp"
#include "corner/normal_form.hpp"
#include "corner/periodic.hpp"
#include "corner/pws_map.hpp"

namespace corner {

struct CornerOptions {
    std::size_t saddle_piece = kLeft;
    /// 0 tracks the first kink of the primary unstable branch (the image of
    /// its first switching crossing); larger values pick later kinks of the
    /// grown branch in order of arclength.
    std::size_t kink_index = 0;
    std::size_t max_steps = 1000;
    double escape_radius = kDefaultEscapeRadius;
    GrowthBudget budget{};
};

struct CornerDistance {
    /// Signed distance to the stable eigenline, positive on the side v_u points to.
    double value = 0.0;
    PlanarPoint kink;
    /// The kink orbit point at which the distance is measured.
    PlanarPoint entry;
    std::size_t kink_id = 0;
    std::size_t iterations_used = 0;
};

/// Follows the tracked kink forward until it first enters the saddle's region
/// and measures its signed distance to the saddle's stable eigenline.
CornerDistance corner_distance(const PwsMap& map, const SaddleData& saddle, const CornerOptions& options = {});

struct CornerLocation {
    double parameter = 0.0;
    CornerDistance distance;
    int evaluations = 0;
};

/// Root of the corner distance over a one-parameter family.
CornerLocation locate_corner(const MapFamily& family, std::pair<double, double> bracket,
                             const CornerOptions& options = {}, double xtol = 1e-12);

using MapFamily2 = std::function<PwsMap(double, double)>;

struct CornerSample {
    double a = 0.0;  ///< stepped parameter (tau_R for the normal form)
    double b = 0.0;  ///< solved parameter (delta_R)
    double residual = 0.0;
};

struct CornerLocus {
    std::vector<CornerSample> samples;  ///< sorted by a
    bool stalled = false;
    std::optional<double> stall_at;
};

struct ContinuationOptions {
    double step = 0.02;
    std::pair<double, double> span{-1.2, 0.0};
    /// Half-width of the bracket around each predicted value.
    double window = 0.05;
    CornerOptions corner{};
};

/// Natural-parameter continuation with a secant predictor: step a, re-solve b
/// by locate_corner inside a window around the prediction, in both directions.
CornerLocus trace_corner_curve(const MapFamily2& family, std::pair<double, double> seed,
                               const ContinuationOptions& options = {});

struct TransversalityCertificate {
    std::size_t piece = 0;  ///< piece whose fixed point carries the manifolds
    PlanarPoint fixed_point;
    PlanarPoint other_fixed_point;
    double eig_stable = 0.0;
    double eig_unstable = 0.0;
    PlanarPoint z_minus1;
    PlanarPoint crossing_point;  ///< unstable eigenline on the switching line
    PlanarPoint z_1;
    PlanarPoint z_2;
    bool crossing = false;
    double angle = 0.0;
    PlanarPoint intersection;
};

/// Checks that the stable segment from the positive-trace fixed point to
/// z_{-1} crosses the unstable segment [z_1, z_2].
TransversalityCertificate transversality_certificate(const ReducedNormalFormParams& reduced, double xi_tilde);

struct ExtraIntersections {
    std::vector<PlanarPoint> points;
    bool ok() const { return points.empty(); }
};

/// Crossings of the grown unstable branch (up to the corner's return) with the
/// local stable eigenline, other than at the tracked corner.
ExtraIntersections check_extra_intersections(const PwsMap& map, const SaddleData& saddle,
                                             const CornerOptions& options = {});

}  // namespace corner
