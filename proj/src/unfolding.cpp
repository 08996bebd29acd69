#include "corner/unfolding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "corner/errors.hpp"
#include "corner/parallel.hpp"

namespace corner {

namespace {

int sign(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

double ipow(double base, std::size_t k) { return std::pow(base, static_cast<double>(k)); }

struct Partials {
    double x, Y, xi;
};

Partials remainder_partials(const std::array<double, 6>& r, double x, double Y, double xi) {
    return {2.0 * r[0] * x + r[1] * Y + r[3] * xi, r[1] * x + 2.0 * r[2] * Y + r[4] * xi,
            r[3] * x + r[4] * Y + 2.0 * r[5] * xi};
}

/// scale * {base + A x + B (y - 1) + C xi + R(x, y - 1, xi)} as a polynomial in (x, y).
Poly2 component(double scale, double base, double A, double B, double C, const std::array<double, 6>& r, double xi) {
    Poly2 p;
    p[0] = base - B + C * xi + r[2] + r[5] * xi * xi - r[4] * xi;
    p[1] = A - r[1] + r[3] * xi;
    p[2] = B - 2.0 * r[2] + r[4] * xi;
    p[3] = r[0];
    p[4] = r[1];
    p[5] = r[2];
    for (std::size_t i = 0; i < Poly2::kTerms; ++i) p[i] *= scale;
    return p;
}

}  // namespace

bool GenericityReport::ok() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.pass; });
}

std::string GenericityReport::failures() const {
    std::string out;
    for (const auto& c : conditions) {
        if (c.pass) continue;
        if (!out.empty()) out += ", ";
        out += c.name;
    }
    return out;
}

GenericityReport validate_genericity(const UnfoldingParams& u) {
    GenericityReport rep;
    auto add = [&](std::string name, double margin) { rep.conditions.push_back({std::move(name), margin > 0.0, margin}); };
    add("saddle_eigenvalues", std::min({u.lambda, 1.0 - u.lambda, u.sigma - 1.0}));
    add("dissipative", 1.0 - u.lambda * u.sigma);
    add("transverse_unstable", std::abs(u.a2));
    add("corner", -u.bX2 * u.bY2);
    add("unfolding_parameter", std::abs(u.c2));
    add("split_index", u.s >= 1 && u.s + 1 <= u.r ? 1.0 : -1.0);
    return rep;
}

Predictions predict(const UnfoldingParams& u, std::size_t k, double xi) {
    const GenericityReport rep = validate_genericity(u);
    if (!rep.ok()) throw GenericityError("genericity violated: " + rep.failures());
    if (k < 1) throw PreconditionError("k must be at least 1");
    const double lk = ipow(u.lambda, k), sk = ipow(u.sigma, k);
    Predictions p;
    p.k = k;
    p.xi = xi;
    p.xi_k = 1.0 / (sk * u.c2);
    p.admissible_side = sign(u.bX2 * u.c2);
    for (Branch b : {Branch::X, Branch::Y}) {
        const double b1 = u.b1(b), b2 = u.b2(b);
        const double dcoef = u.a1 * b2 - u.a2 * b1;
        BranchPrediction& bp = b == Branch::X ? p.X : p.Y;
        bp.x = lk;
        bp.y = 1.0 + (1.0 / sk - (u.c2 + b2 * u.p3) * xi) / b2;
        bp.trace = b2 * sk;
        bp.det = dcoef * lk * sk;
        bp.gamma_u = b2 * sk;
        bp.gamma_s = dcoef * lk / b2;
        bp.v_u = {1.0, -dcoef / b2 * lk};
        bp.v_s = {-1.0 / (b2 * sk), 1.0};
    }
    return p;
}

bool QuadraticRemainder::zero() const {
    return std::all_of(first.begin(), first.end(), [](double v) { return v == 0.0; }) &&
           std::all_of(second.begin(), second.end(), [](double v) { return v == 0.0; });
}

PwsMap build_synthetic_map(const UnfoldingParams& u, std::size_t k, double xi, const QuadraticRemainder& rem) {
    const double lk = ipow(u.lambda, k), sk = ipow(u.sigma, k);
    std::vector<Piece> pieces;
    for (Branch b : {Branch::X, Branch::Y}) {
        const double b1 = u.b1(b), b2 = u.b2(b);
        pieces.push_back(Piece{std::string(1, to_char(b)),
                               component(lk, 1.0, u.a1 + b1 * u.p1, b1, u.c1 + b1 * u.p3, rem.first, xi),
                               component(sk, 0.0, u.a2 + b2 * u.p1, b2, u.c2 + b2 * u.p3, rem.second, xi)});
    }
    std::vector<Poly2> switching{Poly2::affine(-1.0 + u.p3 * xi, u.p1, 1.0)};
    std::vector<std::vector<Constraint>> regions{{{0, Side::NonPositive}}, {{0, Side::NonNegative}}};
    return PwsMap(std::move(pieces), std::move(switching), std::move(regions), "synthetic",
                  {{"k", static_cast<double>(k)}, {"xi", xi}});
}

MapFamily synthetic_family(const UnfoldingParams& u, std::size_t k, const QuadraticRemainder& rem) {
    return [u, k, rem](double xi) { return build_synthetic_map(u, k, xi, rem); };
}

SyntheticOracle synthetic_oracle(const UnfoldingParams& u, std::size_t k) {
    // On h = 0 the branch terms vanish:
    //   (1 - l a1) x - l c1 xi = l,   (s a2 + p1) x + (s c2 + p3) xi = 1.
    const double lk = ipow(u.lambda, k), sk = ipow(u.sigma, k);
    const Mat2 m{1.0 - lk * u.a1, -lk * u.c1, sk * u.a2 + u.p1, sk * u.c2 + u.p3};
    if (m.det() == 0.0) throw NoFixedPointError("degenerate border-collision system");
    const Vec2 sol = m.inverse() * Vec2{lk, 1.0};
    return {sol.y, sol.x};
}

PlanarPoint synthetic_fixed_point(const UnfoldingParams& u, std::size_t k, double xi, Branch branch) {
    const PwsMap map = build_synthetic_map(u, k, xi);
    const Piece& piece = map.piece(branch == Branch::X ? 0 : 1);
    return affine_fixed_point(piece.linear_part(), piece.offset());
}

BcbResult locate_synthetic_bcb(const UnfoldingParams& u, std::size_t k, const QuadraticRemainder& rem) {
    BcbOptions opt;
    opt.seed = 1.0 / (ipow(u.sigma, k) * u.c2);
    opt.step = 0.25 * std::abs(opt.seed);
    opt.guess = PlanarPoint{ipow(u.lambda, k), 1.0};
    return locate_bcb(synthetic_family(u, k, rem), Itinerary{{0}}, 0, opt);
}

PwsMap HattedMap::map(double xi_hat) const {
    std::vector<Piece> pieces;
    for (Branch b : {Branch::X, Branch::Y}) {
        pieces.push_back(Piece{std::string(1, to_char(b)), Poly2::affine(c1 * xi_hat, a1, b1(b)),
                               Poly2::affine(c2 * xi_hat, a2, b2(b))});
    }
    std::vector<Poly2> switching{Poly2::affine(0.0, 0.0, 1.0)};
    std::vector<std::vector<Constraint>> regions{{{0, Side::NonPositive}}, {{0, Side::NonNegative}}};
    return PwsMap(std::move(pieces), std::move(switching), std::move(regions), "hatted",
                  {{"k", static_cast<double>(k)}, {"xi_hat", xi_hat}});
}

HattedMap hatted_transform(const UnfoldingParams& u, std::size_t k, double xi_k, double x_star,
                           const QuadraticRemainder& rem) {
    const double lk = ipow(u.lambda, k), sk = ipow(u.sigma, k);
    const double Y = -u.p1 * x_star - u.p3 * xi_k;  // y - 1 on the switching curve
    const Partials r1 = remainder_partials(rem.first, x_star, Y, xi_k);
    const Partials r2 = remainder_partials(rem.second, x_star, Y, xi_k);

    HattedMap h;
    h.k = k;
    h.xi_k = xi_k;
    h.x_star = x_star;
    // Partial derivatives of the first component do not depend on the branch
    // once expressed in (xh, yh); those of the second do through b2.
    h.a1 = lk * (u.a1 + r1.x - u.p1 * r1.Y);
    h.c1 = lk * (u.c1 + r1.xi - u.p3 * r1.Y);
    h.a2 = sk * (u.a2 + r2.x - u.p1 * r2.Y) + u.p1 * h.a1;
    h.c2 = sk * (u.c2 + r2.xi - u.p3 * r2.Y) + u.p1 * h.c1 + u.p3;
    for (Branch b : {Branch::X, Branch::Y}) {
        const double f1y = lk * (u.b1(b) + r1.Y);
        const double f2y = sk * (u.b2(b) + r2.Y);
        (b == Branch::X ? h.bX1 : h.bY1) = f1y;
        (b == Branch::X ? h.bX2 : h.bY2) = f2y + u.p1 * f1y;
    }
    return h;
}

HattedMap hatted_transform(const UnfoldingParams& u, std::size_t k) {
    const SyntheticOracle o = synthetic_oracle(u, k);
    return hatted_transform(u, k, o.xi_k, o.x_star);
}

TildedTransform tilded_transform(const HattedMap& h) {
    if (h.a2 == 0.0 || !std::isfinite(h.a2)) throw NonObservableError("a2 of the hatted map vanishes");
    if (h.c2 == 0.0 || !std::isfinite(h.c2)) throw NonObservableError("c2 of the hatted map vanishes");
    TildedTransform t;
    t.P = {0.0, 1.0, h.a2, -h.a1};
    t.q = {0.0, h.a1 * h.c2 - h.a2 * h.c1};
    t.xi_scale = h.c2 - h.a1 * h.c2 + h.a2 * h.c1;
    if (t.xi_scale == 0.0) throw NonObservableError("parameter direction is not observable");
    t.params.tauX = h.a1 + h.bX2;
    t.params.deltaX = h.a1 * h.bX2 - h.a2 * h.bX1;
    t.params.tauY = h.a1 + h.bY2;
    t.params.deltaY = h.a1 * h.bY2 - h.a2 * h.bY1;
    return t;
}

std::vector<SignQuadrant> quadrant_table() {
    std::vector<SignQuadrant> out;
    for (int c2 : {-1, 1}) {
        for (int bx : {-1, 1}) out.push_back({c2, bx, c2, c2 * bx});
    }
    return out;
}

SignQuadrant observe_quadrant(const UnfoldingParams& u, std::size_t k) {
    SignQuadrant q;
    q.sign_c2 = sign(u.c2);
    q.sign_bX2 = sign(u.bX2);
    const SyntheticOracle o = synthetic_oracle(u, k);
    q.bcb_side = sign(o.xi_k);
    q.existence_side = 0;
    const double eps = 1e-3 * std::abs(o.xi_k);
    for (int side : {1, -1}) {
        const PwsMap map = build_synthetic_map(u, k, o.xi_k + side * eps);
        const PeriodicOrbit x = solve_periodic(map, Itinerary{{0}});
        const PeriodicOrbit y = solve_periodic(map, Itinerary{{1}});
        if (x.admissible(0.0) && y.admissible(0.0)) q.existence_side = side;
    }
    return q;
}

ScalingFit fit_scaling(const std::vector<std::size_t>& ks, const std::vector<double>& devs, double lambda,
                       double sigma) {
    // Minimise sum ((dev_k - C1 l^k - C2 s^-2k) / dev_k)^2.
    double s11 = 0.0, s12 = 0.0, s22 = 0.0, t1 = 0.0, t2 = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (devs[i] == 0.0) continue;
        const double u = ipow(lambda, ks[i]) / devs[i];
        const double v = 1.0 / (ipow(sigma, 2 * ks[i]) * devs[i]);
        s11 += u * u;
        s12 += u * v;
        s22 += v * v;
        t1 += u;
        t2 += v;
    }
    ScalingFit fit;
    const double det = s11 * s22 - s12 * s12;
    if (det != 0.0) {
        fit.C1 = (t1 * s22 - t2 * s12) / det;
        fit.C2 = (s11 * t2 - s12 * t1) / det;
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const double l = ipow(lambda, ks[i]);
        const double q = 1.0 / ipow(sigma, 2 * ks[i]);
        const double miss = std::abs(devs[i] - (fit.C1 * l + fit.C2 * q));
        const double scale = std::abs(fit.C1) * l + std::abs(fit.C2) * q;
        fit.residual = std::max(fit.residual, devs[i] != 0.0 ? miss / std::abs(devs[i]) : miss);
        fit.residual_terms = std::max(fit.residual_terms, scale > 0.0 ? miss / scale : miss);
    }
    // |dev| <= |model| + miss <= max(|C1|, |C2|) (l + q) (1 + residual_terms)
    fit.C = std::max(std::abs(fit.C1), std::abs(fit.C2)) * (1.0 + fit.residual_terms);
    return fit;
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 of the combined value
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

UnfoldingParams random_unfolding_params(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * std::generate_canonical<double, 53>(rng); };
    auto coef = [&] {
        const double m = uni(0.5, 2.0);
        return uni(0.0, 1.0) < 0.5 ? -m : m;
    };
    UnfoldingParams u;
    u.sigma = uni(1.3, 2.5);
    u.lambda = uni(0.1, 0.9 / u.sigma);
    u.a1 = coef();
    u.a2 = coef();
    u.bX1 = coef();
    u.bX2 = coef();
    u.bY1 = coef();
    u.bY2 = -std::copysign(uni(0.5, 2.0), u.bX2);
    u.c1 = coef();
    u.c2 = coef();
    u.p1 = uni(-1.0, 1.0);
    u.p3 = uni(-1.0, 1.0);
    return u;
}

DrawResult validate_draw(const UnfoldingParams& u, std::uint64_t seed, const ValidationOptions& options) {
    DrawResult d;
    d.seed = seed;
    d.params = u;
    std::vector<double> devs;
    for (std::size_t k = options.k_min; k <= options.k_max; ++k) {
        const double exact = synthetic_oracle(u, k).xi_k;
        const double numeric = locate_synthetic_bcb(u, k).xi;
        d.ks.push_back(k);
        d.xi_exact.push_back(exact);
        d.xi_numeric.push_back(numeric);
        d.oracle_error = std::max(d.oracle_error, std::abs(numeric - exact));
        devs.push_back(numeric - 1.0 / (ipow(u.sigma, k) * u.c2));
    }
    d.fit = fit_scaling(d.ks, devs, u.lambda, u.sigma);

    const Predictions pred = predict(u, options.k_check, synthetic_oracle(u, options.k_check).xi_k);
    const PwsMap map = build_synthetic_map(u, options.k_check, pred.xi);
    for (Branch b : {Branch::X, Branch::Y}) {
        const Mat2 j = map.piece(b == Branch::X ? 0 : 1).linear_part();
        const auto [small, large] = eigenvalues(j.trace(), j.det());
        const BranchPrediction& bp = pred.branch(b);
        d.eigen_u_error = std::max(d.eigen_u_error, std::abs(large.real() / bp.gamma_u - 1.0));
        d.eigen_s_error = std::max(d.eigen_s_error, std::abs(small.real() / bp.gamma_s - 1.0));
    }
    d.ok = d.oracle_error <= options.oracle_tol && d.fit.residual < options.fit_tol &&
           d.eigen_u_error <= options.eigen_tol && d.eigen_s_error <= options.eigen_tol;
    return d;
}

std::vector<SignQuadrant> observe_quadrants() {
    std::vector<SignQuadrant> out;
    for (const auto& q : quadrant_table()) {
        UnfoldingParams u;
        u.a1 = 0.3;
        u.bX1 = 0.2;
        u.bY1 = -0.4;
        u.c1 = 0.5;
        u.p1 = 0.3;
        u.p3 = -0.2;
        u.c2 = q.sign_c2;
        u.bX2 = q.sign_bX2;
        u.bY2 = -q.sign_bX2;
        out.push_back(observe_quadrant(u, 10));
    }
    return out;
}

ValidationReport run_validation_suite(const ValidationOptions& options) {
    ValidationReport rep;
    rep.draws.resize(options.draws);
    parallel_for(options.draws, options.workers, [&](std::size_t i) {
        const std::uint64_t seed = split_seed(options.seed, i);
        rep.draws[i] = validate_draw(random_unfolding_params(seed), seed, options);
    });
    for (const auto& d : rep.draws) {
        rep.worst_oracle_error = std::max(rep.worst_oracle_error, d.oracle_error);
        rep.worst_fit_residual = std::max(rep.worst_fit_residual, d.fit.residual);
        rep.worst_eigen_error = std::max({rep.worst_eigen_error, d.eigen_u_error, d.eigen_s_error});
        if (d.ok) ++rep.passed;
    }
    rep.predicted_quadrants = quadrant_table();
    rep.observed_quadrants = observe_quadrants();
    rep.quadrants_match = rep.predicted_quadrants == rep.observed_quadrants;
    return rep;
}

}  // namespace corner
