#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "corner/normal_form.hpp"
#include "corner/pws_map.hpp"

namespace corner {

struct GrowthBudget {
    std::size_t max_vertices = 200000;
    double max_arclength = 100.0;
    std::size_t max_generations = 60;
    double seed_distance = 1e-6;
    double escape_radius = kDefaultEscapeRadius;
    /// Vertices per generation for maps with nonlinear pieces.
    std::size_t samples_per_generation = 1000;
};

enum class ManifoldKind { Stable, Unstable };

const char* to_string(ManifoldKind kind);

struct ManifoldPolyline {
    std::vector<PlanarPoint> vertices;
    std::vector<bool> kink;
    /// Map applications since the switching crossing that created the kink; -1 off kinks.
    std::vector<int> kink_generation;
    /// Growth generation each vertex belongs to (0 is the fundamental segment).
    std::vector<int> generation;
    ManifoldKind kind = ManifoldKind::Unstable;
    SaddleData saddle;
    int direction = 1;  ///< which half of the eigenline (+v or -v) was seeded
    /// Pieces used by the backward steps that produced this polyline (stable only).
    std::vector<std::size_t> branch_word;
    bool truncated = false;
    /// Dense sampling was used because some piece is nonlinear.
    bool approximate = false;
    /// Switching crossings of the segments of generation g (unstable growth).
    std::vector<std::size_t> crossings_per_generation;
    /// Kinks first appearing in generation g.
    std::vector<std::size_t> new_kinks_per_generation;

    std::size_t size() const { return vertices.size(); }
    std::size_t kink_count() const;
    double arclength() const;
};

/// Unstable manifold branch grown by mapping a fundamental segment forward and
/// splitting every segment exactly where it crosses a switching manifold.
/// The second iterate is used when the unstable eigenvalue is negative.
ManifoldPolyline grow_unstable(const PwsMap& map, const SaddleData& saddle, const GrowthBudget& budget,
                               int direction = 1);

struct StableManifold {
    std::vector<ManifoldPolyline> pieces;
    bool truncated = false;

    std::size_t kink_count() const;
};

/// Stable manifold branch grown breadth-first under the (multivalued) inverse
/// of a piecewise-affine map; preimages outside their piece's region are pruned.
StableManifold grow_stable(const PwsMap& map, const SaddleData& saddle, const GrowthBudget& budget,
                           int direction = 1);

struct ManifoldSet {
    ManifoldPolyline unstable_plus;
    ManifoldPolyline unstable_minus;
    StableManifold stable_plus;
    StableManifold stable_minus;
};

/// All four branches, grown concurrently.
ManifoldSet grow_manifolds(const PwsMap& map, const SaddleData& saddle, const GrowthBudget& budget,
                           std::size_t workers = 1);

/// Vertices from the point where the polyline first leaves the disc of
/// `radius` about `center` (that point included). Empty if it never leaves.
std::vector<PlanarPoint> beyond_radius(const std::vector<PlanarPoint>& vertices, PlanarPoint center, double radius);

struct DistanceWitness {
    double distance = 0.0;
    PlanarPoint on_a;
    PlanarPoint on_b;
    std::size_t segment_a = 0;
    std::size_t segment_b = 0;
};

DistanceWitness segment_distance(PlanarPoint a0, PlanarPoint a1, PlanarPoint b0, PlanarPoint b1);

/// Exact minimum segment-to-segment distance with bounding-box pruning.
DistanceWitness polyline_min_distance(const std::vector<PlanarPoint>& a, const std::vector<PlanarPoint>& b);
DistanceWitness polyline_min_distance(const ManifoldPolyline& a, const ManifoldPolyline& b);
/// Minimum over every pair of pieces; segment indices refer to the realising pieces.
DistanceWitness polyline_min_distance(const std::vector<ManifoldPolyline>& a,
                                      const std::vector<ManifoldPolyline>& b);

inline constexpr double kTangentialAngle = 1e-6;

struct Crossing {
    PlanarPoint point;
    double angle = 0.0;  ///< acute angle between the two segments, radians
    std::size_t segment_a = 0;
    std::size_t segment_b = 0;
};

/// Proper crossings between the two polylines, skipping near-tangential ones.
std::vector<Crossing> transverse_intersections(const std::vector<PlanarPoint>& a,
                                               const std::vector<PlanarPoint>& b,
                                               double angle_tolerance = kTangentialAngle);
std::vector<Crossing> transverse_intersections(const ManifoldPolyline& a, const ManifoldPolyline& b,
                                               double angle_tolerance = kTangentialAngle);

}  // namespace corner
