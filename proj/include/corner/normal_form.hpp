#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "corner/geometry.hpp"
#include "corner/pws_map.hpp"

namespace corner {

/// Parameters of the two-dimensional border-collision normal form
///   (x, y) -> (tau x + y + mu, -delta x),  with (tau, delta) = (tau_L, delta_L)
/// for x <= 0 and (tau_R, delta_R) for x >= 0.
struct NormalFormParams {
    double tau_L = 0.0;
    double delta_L = 0.0;
    double tau_R = 0.0;
    double delta_R = 0.0;
    double mu = 0.0;
    friend bool operator==(const NormalFormParams&, const NormalFormParams&) = default;
};

enum class NfSide : std::size_t { Left = 0, Right = 1 };

/// Label index of each side in maps built by make_normal_form.
inline constexpr std::size_t kLeft = 0;
inline constexpr std::size_t kRight = 1;

PwsMap make_normal_form(const NormalFormParams& p);
NormalFormParams normal_form_params(const PwsMap& map);

/// Normal-form parameters of the two branches X (x <= 0) and Y (x >= 0) of a
/// return map after centring at a border collision.
struct ReducedNormalFormParams {
    double tauX = 0.0;
    double deltaX = 0.0;
    double tauY = 0.0;
    double deltaY = 0.0;
    friend bool operator==(const ReducedNormalFormParams&, const ReducedNormalFormParams&) = default;
};

/// The normal form with pieces labelled "X" and "Y" and offset xi_tilde.
PwsMap make_reduced_normal_form(const ReducedNormalFormParams& p, double xi_tilde);

enum class FixedPointKind {
    Saddle,
    StableNode,
    UnstableNode,
    StableFocus,
    UnstableFocus,
    NonHyperbolic,
};

const char* to_string(FixedPointKind kind);

/// A saddle fixed point of an affine piece.
struct SaddleData {
    PlanarPoint point;
    double lambda = 0.0;  ///< stable eigenvalue, |lambda| < 1
    double sigma = 0.0;   ///< unstable eigenvalue, |sigma| > 1
    Vec2 v_s;             ///< unit, first nonzero component positive
    Vec2 v_u;
    std::size_t piece = 0;
};

struct FixedPointInfo {
    std::size_t piece = 0;
    PlanarPoint point;
    double trace = 0.0;
    double det = 0.0;
    std::complex<double> eig_small;
    std::complex<double> eig_large;
    FixedPointKind kind = FixedPointKind::NonHyperbolic;
    bool admissible = false;
    std::optional<SaddleData> saddle;
};

/// Fixed point of one affine piece of any piecewise-affine map, with
/// eigen-data and an admissibility flag (closed region).
FixedPointInfo affine_piece_fixed_point(const PwsMap& map, std::size_t piece);

FixedPointInfo piece_fixed_point(const NormalFormParams& params, NfSide side);

/// Saddle of `piece` or PreconditionError when the fixed point is no saddle.
SaddleData saddle_of_piece(const PwsMap& map, std::size_t piece);

/// Segment {origin + t * direction : t_min <= t <= t_max}; the bounds may be infinite.
struct Eigenline {
    PlanarPoint origin;
    Vec2 direction;
    double t_min = -std::numeric_limits<double>::infinity();
    double t_max = std::numeric_limits<double>::infinity();

    PlanarPoint at(double t) const { return origin + t * direction; }
};

struct SaddleEigenlines {
    Eigenline stable;
    Eigenline unstable;
};

/// Local stable and unstable eigenlines through the saddle, each clipped to
/// the part lying in the saddle's own closed region.
SaddleEigenlines saddle_eigenlines(const PwsMap& map, const SaddleData& s);

/// Where the unstable eigenline first leaves the saddle's region: the nearer
/// of its two ends; `direction` tells which half (+v_u or -v_u) it lies on.
struct EigenlineCrossing {
    PlanarPoint point;
    double t = 0.0;
    int direction = 1;
};

std::optional<EigenlineCrossing> primary_unstable_crossing(const PwsMap& map, const SaddleData& s);

/// Clip a line to the closed region of `piece` (affine switching only).
Eigenline clip_to_region(const PwsMap& map, std::size_t piece, PlanarPoint origin, Vec2 direction);

/// Preimage of q under one side of the normal form. Throws NonInvertibleError when delta = 0.
PlanarPoint invert_piece(const NormalFormParams& params, NfSide side, PlanarPoint q);

/// The one-dimensional map x -> slope x + offset, slope_left for x <= 0.
struct SkewTentParams {
    double slope_left = 0.0;
    double slope_right = 0.0;
    double offset = 0.0;
    friend bool operator==(const SkewTentParams&, const SkewTentParams&) = default;
};

double skew_tent_map(const SkewTentParams& params, double x);
/// x0 followed by n iterates (n + 1 values).
std::vector<double> skew_tent_iterate(const SkewTentParams& params, double x0, std::size_t n);

struct TentFixedPoint {
    double x = 0.0;
    bool left = true;
    bool admissible = false;
    bool unstable = false;
};

std::vector<TentFixedPoint> skew_tent_fixed_points(const SkewTentParams& params);

}  // namespace corner
