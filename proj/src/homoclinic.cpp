#include "corner/homoclinic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "corner/errors.hpp"
#include "corner/roots.hpp"

namespace corner {

namespace {

/// Unit normal of the stable eigenline, oriented towards v_u.
Vec2 stable_normal(const SaddleData& s) {
    Vec2 n{-s.v_s.y, s.v_s.x};
    if (dot(n, s.v_u) < 0.0) n = -n;
    return n;
}

}  // namespace

CornerDistance corner_distance(const PwsMap& map, const SaddleData& saddle, const CornerOptions& options) {
    const auto cr = primary_unstable_crossing(map, saddle);
    if (!cr) throw BudgetError("unstable branch never reaches a switching manifold");
    const auto labels = map.labels_at(cr->point, 1e-9);
    bool kinked = false;
    for (std::size_t i = 0; i < labels.size() && !kinked; ++i) {
        for (std::size_t j = i + 1; j < labels.size(); ++j) {
            const Piece& a = map.piece(labels[i]);
            const Piece& b = map.piece(labels[j]);
            if (!(a.fx == b.fx && a.fy == b.fy)) kinked = true;
        }
    }
    if (!kinked) throw BudgetError("unstable branch has no kink");

    CornerDistance out;
    out.kink_id = options.kink_index;
    if (options.kink_index == 0) {
        out.kink = map.piece(labels.front())(cr->point);
    } else {
        const ManifoldPolyline wu = grow_unstable(map, saddle, options.budget, cr->direction);
        std::size_t seen = 0;
        bool found = false;
        for (std::size_t i = 0; i < wu.size(); ++i) {
            if (!wu.kink[i]) continue;
            if (seen++ == options.kink_index) {
                out.kink = wu.vertices[i];
                found = true;
                break;
            }
        }
        if (!found) throw BudgetError("requested kink not reached within the growth budget");
    }

    PlanarPoint p = out.kink;
    std::size_t steps = 0;
    while (!map.in_region(saddle.piece, p)) {
        if (steps >= options.max_steps) throw BudgetError("kink orbit never entered the saddle's region");
        p = map.evaluate(p).image;
        ++steps;
        if (!is_finite(p) || norm(p) > options.escape_radius) throw EscapeError("kink orbit escaped");
    }
    out.entry = p;
    out.iterations_used = steps;
    out.value = dot(p - saddle.point, stable_normal(saddle));
    return out;
}

CornerLocation locate_corner(const MapFamily& family, std::pair<double, double> bracket,
                             const CornerOptions& options, double xtol) {
    int evaluations = 0;
    auto eval = [&](double xi) {
        ++evaluations;
        try {
            const PwsMap map = family(xi);
            return corner_distance(map, saddle_of_piece(map, options.saddle_piece), options);
        } catch (const BudgetError& e) {
            throw BracketError(std::string("corner distance undefined: ") + e.what());
        } catch (const PreconditionError& e) {
            throw BracketError(std::string("corner distance undefined: ") + e.what());
        }
    };
    const RootResult root =
        find_root([&](double xi) { return eval(xi).value; }, bracket.first, bracket.second, xtol);
    CornerLocation out;
    out.parameter = root.root;
    out.distance = eval(root.root);
    out.evaluations = evaluations;
    return out;
}

CornerLocus trace_corner_curve(const MapFamily2& family, std::pair<double, double> seed,
                               const ContinuationOptions& options) {
    CornerLocus locus;
    const double lo = std::min(options.span.first, options.span.second);
    const double hi = std::max(options.span.first, options.span.second);
    const double w = options.window;

    auto solve_in = [&](double a, double lo_b, double hi_b) -> std::optional<CornerSample> {
        try {
            const CornerLocation loc =
                locate_corner([&](double b) { return family(a, b); }, {lo_b, hi_b}, options.corner);
            return CornerSample{a, loc.parameter, std::abs(loc.distance.value)};
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    auto solve = [&](double a, double guess) { return solve_in(a, guess - w, guess + w); };

    const auto start = solve(seed.first, seed.second);
    if (!start) {
        locus.stalled = true;
        locus.stall_at = seed.first;
        return locus;
    }
    locus.samples.push_back(*start);
    const double step = std::abs(options.step);
    if (step == 0.0) return locus;

    for (int dir : {1, -1}) {
        CornerSample prev = *start;
        std::optional<CornerSample> before;
        double a = seed.first;
        while (true) {
            const double bound = dir > 0 ? hi : lo;
            if ((dir > 0 && a >= hi) || (dir < 0 && a <= lo)) break;
            a += dir * step;
            if ((dir > 0 && a > hi) || (dir < 0 && a < lo)) a = bound;
            double guess = prev.b;
            if (before) guess += (prev.b - before->b) / (prev.a - before->a) * (a - prev.a);
            auto next = solve(a, guess);
            // the curve may turn sharply (codimension-two points); retry around the last sample
            if (!next) next = solve_in(a, std::min(guess, prev.b) - 2.0 * w, std::max(guess, prev.b) + 2.0 * w);
            if (!next) {
                locus.stalled = true;
                locus.stall_at = a;
                break;
            }
            locus.samples.push_back(*next);
            before = prev;
            prev = *next;
        }
    }
    std::sort(locus.samples.begin(), locus.samples.end(),
              [](const CornerSample& x, const CornerSample& y) { return x.a < y.a; });
    return locus;
}

TransversalityCertificate transversality_certificate(const ReducedNormalFormParams& reduced, double xi_tilde) {
    const PwsMap map = make_reduced_normal_form(reduced, xi_tilde);
    const FixedPointInfo fx = affine_piece_fixed_point(map, 0);
    const FixedPointInfo fy = affine_piece_fixed_point(map, 1);
    if (!fx.admissible || !fy.admissible) {
        throw PreconditionError("both fixed points must be admissible for this sign of xi");
    }
    TransversalityCertificate cert;
    cert.piece = reduced.tauY >= reduced.tauX ? 1 : 0;
    const FixedPointInfo& f = cert.piece == 1 ? fy : fx;
    cert.fixed_point = f.point;
    cert.other_fixed_point = (cert.piece == 1 ? fx : fy).point;
    if (!f.saddle) throw PreconditionError("positive-trace fixed point is not a saddle");
    const SaddleData& s = *f.saddle;
    cert.eig_stable = s.lambda;
    cert.eig_unstable = s.sigma;
    if (s.v_s.x == 0.0 || s.v_u.x == 0.0) throw PreconditionError("eigenline parallel to the switching line");

    cert.z_minus1 = s.point + (-s.point.x / s.v_s.x) * s.v_s;
    cert.z_minus1.x = 0.0;
    cert.crossing_point = s.point + (-s.point.x / s.v_u.x) * s.v_u;
    cert.crossing_point.x = 0.0;
    cert.z_1 = map.evaluate(cert.crossing_point).image;
    cert.z_2 = map.evaluate(cert.z_1).image;

    const auto hits = transverse_intersections(std::vector<PlanarPoint>{cert.fixed_point, cert.z_minus1},
                                               std::vector<PlanarPoint>{cert.z_1, cert.z_2});
    if (!hits.empty()) {
        cert.crossing = true;
        cert.angle = hits.front().angle;
        cert.intersection = hits.front().point;
    }
    return cert;
}

ExtraIntersections check_extra_intersections(const PwsMap& map, const SaddleData& saddle,
                                             const CornerOptions& options) {
    const CornerDistance cd = corner_distance(map, saddle, options);
    const auto cr = primary_unstable_crossing(map, saddle);

    // Generation holding the first kink, then as many more as the kink needs to return.
    GrowthBudget budget = options.budget;
    const ManifoldPolyline probe = grow_unstable(map, saddle, budget, cr->direction);
    int first_kink_generation = -1;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        if (probe.kink[i]) {
            first_kink_generation = probe.generation[i];
            break;
        }
    }
    ExtraIntersections out;
    if (first_kink_generation < 0) return out;
    budget.max_generations = static_cast<std::size_t>(first_kink_generation) + cd.iterations_used + 1;
    const ManifoldPolyline wu = grow_unstable(map, saddle, budget, cr->direction);

    const Eigenline es = saddle_eigenlines(map, saddle).stable;
    const double reach = options.budget.max_arclength;
    const std::vector<PlanarPoint> line{es.at(std::max(es.t_min, -reach)), es.at(std::min(es.t_max, reach))};
    for (const Crossing& c : transverse_intersections(wu.vertices, line)) {
        if (distance(c.point, cd.entry) > 1e-6 && distance(c.point, saddle.point) > 1e-6) {
            out.points.push_back(c.point);
        }
    }
    return out;
}

}  // namespace corner
