#include "corner/normal_form.hpp"

#include <algorithm>
#include <cmath>

#include "corner/errors.hpp"

namespace corner {

PwsMap make_normal_form(const NormalFormParams& p) {
    std::vector<Piece> pieces{
        Piece{"L", Poly2::affine(p.mu, p.tau_L, 1.0), Poly2::affine(0.0, -p.delta_L, 0.0)},
        Piece{"R", Poly2::affine(p.mu, p.tau_R, 1.0), Poly2::affine(0.0, -p.delta_R, 0.0)},
    };
    std::vector<Poly2> switching{Poly2::affine(0.0, 1.0, 0.0)};
    std::vector<std::vector<Constraint>> regions{{{0, Side::NonPositive}}, {{0, Side::NonNegative}}};
    return PwsMap(std::move(pieces), std::move(switching), std::move(regions), "bcnf",
                  {{"tau_L", p.tau_L}, {"delta_L", p.delta_L}, {"tau_R", p.tau_R},
                   {"delta_R", p.delta_R}, {"mu", p.mu}});
}

PwsMap make_reduced_normal_form(const ReducedNormalFormParams& p, double xi_tilde) {
    std::vector<Piece> pieces{
        Piece{"X", Poly2::affine(xi_tilde, p.tauX, 1.0), Poly2::affine(0.0, -p.deltaX, 0.0)},
        Piece{"Y", Poly2::affine(xi_tilde, p.tauY, 1.0), Poly2::affine(0.0, -p.deltaY, 0.0)},
    };
    std::vector<Poly2> switching{Poly2::affine(0.0, 1.0, 0.0)};
    std::vector<std::vector<Constraint>> regions{{{0, Side::NonPositive}}, {{0, Side::NonNegative}}};
    return PwsMap(std::move(pieces), std::move(switching), std::move(regions), "reduced",
                  {{"tauX", p.tauX}, {"deltaX", p.deltaX}, {"tauY", p.tauY}, {"deltaY", p.deltaY},
                   {"xi", xi_tilde}});
}

NormalFormParams normal_form_params(const PwsMap& map) {
    if (map.kind() != "bcnf") throw Error("map is not a border-collision normal form");
    return {*map.param("tau_L"), *map.param("delta_L"), *map.param("tau_R"), *map.param("delta_R"),
            *map.param("mu")};
}

const char* to_string(FixedPointKind kind) {
    switch (kind) {
        case FixedPointKind::Saddle: return "saddle";
        case FixedPointKind::StableNode: return "stable-node";
        case FixedPointKind::UnstableNode: return "unstable-node";
        case FixedPointKind::StableFocus: return "stable-focus";
        case FixedPointKind::UnstableFocus: return "unstable-focus";
        case FixedPointKind::NonHyperbolic: return "non-hyperbolic";
    }
    return "unknown";
}

namespace {

// Eigenvector of a 2x2 matrix for a real eigenvalue g.
Vec2 eigenvector(const Mat2& a, double g) {
    // Rows of (A - gI); pick the better conditioned one.
    const Vec2 r1{a.a - g, a.b};
    const Vec2 r2{a.c, a.d - g};
    const Vec2 r = norm(r1) >= norm(r2) ? r1 : r2;
    if (norm(r) == 0.0) return {1.0, 0.0};
    return canonical_direction({-r.y, r.x});
}

}  // namespace

FixedPointInfo affine_piece_fixed_point(const PwsMap& map, std::size_t piece) {
    const Piece& pc = map.piece(piece);
    if (!pc.is_affine()) throw PreconditionError("piece " + pc.label + " is not affine");
    const Mat2 a = pc.linear_part();
    FixedPointInfo info;
    info.piece = piece;
    info.point = affine_fixed_point(a, pc.offset());
    info.trace = a.trace();
    info.det = a.det();
    auto [e1, e2] = eigenvalues(info.trace, info.det);
    info.eig_small = e1;
    info.eig_large = e2;
    const double m1 = std::abs(e1), m2 = std::abs(e2);
    constexpr double tol = 1e-12;
    const bool complex = e1.imag() != 0.0;
    if (std::abs(m1 - 1.0) < tol || std::abs(m2 - 1.0) < tol) {
        info.kind = FixedPointKind::NonHyperbolic;
    } else if (complex) {
        info.kind = m2 < 1.0 ? FixedPointKind::StableFocus : FixedPointKind::UnstableFocus;
    } else if (m1 < 1.0 && m2 > 1.0) {
        info.kind = FixedPointKind::Saddle;
    } else {
        info.kind = m2 < 1.0 ? FixedPointKind::StableNode : FixedPointKind::UnstableNode;
    }
    info.admissible = map.in_region(piece, info.point, kDefaultContinuityTolerance);
    if (info.kind == FixedPointKind::Saddle) {
        SaddleData s;
        s.point = info.point;
        s.lambda = e1.real();
        s.sigma = e2.real();
        s.v_s = eigenvector(a, s.lambda);
        s.v_u = eigenvector(a, s.sigma);
        s.piece = piece;
        info.saddle = s;
    }
    return info;
}

FixedPointInfo piece_fixed_point(const NormalFormParams& params, NfSide side) {
    const double tau = side == NfSide::Left ? params.tau_L : params.tau_R;
    const double delta = side == NfSide::Left ? params.delta_L : params.delta_R;
    if (1.0 - tau + delta == 0.0) throw NoFixedPointError("1 - tau + delta = 0: no isolated fixed point");
    return affine_piece_fixed_point(make_normal_form(params), static_cast<std::size_t>(side));
}

SaddleData saddle_of_piece(const PwsMap& map, std::size_t piece) {
    auto info = affine_piece_fixed_point(map, piece);
    if (!info.saddle) {
        throw PreconditionError("fixed point of piece " + map.piece(piece).label + " is a " +
                                to_string(info.kind) + ", not a saddle");
    }
    return *info.saddle;
}

Eigenline clip_to_region(const PwsMap& map, std::size_t piece, PlanarPoint origin, Vec2 direction) {
    Eigenline line{origin, direction};
    for (const auto& c : map.region(piece)) {
        const Poly2& h = map.switching()[c.switching];
        if (h.degree() > 1) throw PreconditionError("eigenline clipping needs affine switching functions");
        // Side-adjusted value along the line: v(t) = v0 + t * dv >= 0.
        double v0 = h(origin);
        double dv = h[1] * direction.x + h[2] * direction.y;
        if (c.side == Side::NonPositive) { v0 = -v0; dv = -dv; }
        if (dv > 0.0) {
            line.t_min = std::max(line.t_min, -v0 / dv);
        } else if (dv < 0.0) {
            line.t_max = std::min(line.t_max, -v0 / dv);
        } else if (v0 < 0.0) {
            line.t_min = 0.0;
            line.t_max = 0.0;
        }
    }
    return line;
}

SaddleEigenlines saddle_eigenlines(const PwsMap& map, const SaddleData& s) {
    return {clip_to_region(map, s.piece, s.point, s.v_s), clip_to_region(map, s.piece, s.point, s.v_u)};
}

std::optional<EigenlineCrossing> primary_unstable_crossing(const PwsMap& map, const SaddleData& s) {
    const Eigenline eu = saddle_eigenlines(map, s).unstable;
    const bool lo = std::isfinite(eu.t_min), hi = std::isfinite(eu.t_max);
    if (!lo && !hi) return std::nullopt;
    double t = hi ? eu.t_max : eu.t_min;
    if (lo && hi && std::abs(eu.t_min) < std::abs(eu.t_max)) t = eu.t_min;
    return EigenlineCrossing{eu.at(t), t, t >= 0.0 ? 1 : -1};
}

PlanarPoint invert_piece(const NormalFormParams& params, NfSide side, PlanarPoint q) {
    const double tau = side == NfSide::Left ? params.tau_L : params.tau_R;
    const double delta = side == NfSide::Left ? params.delta_L : params.delta_R;
    if (delta == 0.0) throw NonInvertibleError("delta = 0: piece is not invertible");
    return {-q.y / delta, q.x - params.mu + tau * q.y / delta};
}

double skew_tent_map(const SkewTentParams& params, double x) {
    return (x <= 0.0 ? params.slope_left : params.slope_right) * x + params.offset;
}

std::vector<double> skew_tent_iterate(const SkewTentParams& params, double x0, std::size_t n) {
    std::vector<double> xs;
    xs.reserve(n + 1);
    xs.push_back(x0);
    for (std::size_t i = 0; i < n; ++i) xs.push_back(skew_tent_map(params, xs.back()));
    return xs;
}

std::vector<TentFixedPoint> skew_tent_fixed_points(const SkewTentParams& params) {
    std::vector<TentFixedPoint> out;
    for (bool left : {true, false}) {
        const double slope = left ? params.slope_left : params.slope_right;
        if (slope == 1.0) continue;
        TentFixedPoint fp;
        fp.left = left;
        fp.x = params.offset / (1.0 - slope);
        fp.admissible = left ? fp.x <= 0.0 : fp.x >= 0.0;
        fp.unstable = std::abs(slope) > 1.0;
        out.push_back(fp);
    }
    return out;
}

}  // namespace corner
