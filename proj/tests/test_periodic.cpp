#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "gen.hpp"

#include "corner/errors.hpp"
#include "corner/experiments.hpp"
#include "corner/normal_form.hpp"
#include "corner/periodic.hpp"
#include "corner/unfolding.hpp"

using namespace corner;

namespace {

NormalFormParams at_delta(double delta_R) { return {2.0, 0.75, -0.6, delta_R, 1.0}; }

MapFamily delta_family() {
    return [](double d) { return make_normal_form(at_delta(d)); };
}

double hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    auto one_way = [](const std::vector<Vec2>& p, const std::vector<Vec2>& q) {
        double worst = 0.0;
        for (auto u : p) {
            double best = INFINITY;
            for (auto v : q) best = std::min(best, distance(u, v));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_way(a, b), one_way(b, a));
}

Excursion case_excursion(double delta_R) {
    const auto map = make_normal_form(at_delta(delta_R));
    return extract_excursion(map, saddle_of_piece(map, kLeft));
}

}  // namespace

TEST_CASE("period one orbits") {
    const auto map = make_normal_form(at_delta(1.35));
    const auto l = solve_periodic(map, parse_itinerary(map, "L"));
    CHECK(distance(l.points[0], {-4.0, 3.0}) < 1e-14);
    CHECK(l.admissible());
    CHECK(l.stability == Stability::Saddle);

    const auto r = solve_periodic(map, parse_itinerary(map, "R"));
    CHECK(r.points[0].x == doctest::Approx(0.33898).epsilon(1e-4));
    CHECK(r.points[0].y == doctest::Approx(-0.45763).epsilon(1e-4));
    CHECK(r.admissible());
    CHECK(r.stability == Stability::Unstable);
}

TEST_CASE("eigenvalue one is reported") {
    // tau = 1 + delta gives an eigenvalue at 1
    const auto map = make_normal_form({1.5, 0.5, 0.0, 0.5, 1.0});
    CHECK_THROWS_AS(solve_periodic(map, parse_itinerary(map, "L")), NoFixedPointError);
}

TEST_CASE("excursion of the corner orbit") {
    const auto ex = case_excursion(1.35);
    const auto map = make_normal_form(at_delta(1.35));
    CHECK(format_itinerary(map, ex.word) == "LLR");
    CHECK(ex.split == 1);
    CHECK(distance(ex.crossing, {0.0, 1.0}) < 1e-13);
    CHECK(format_itinerary(map, single_round_itinerary(ex, Branch::X, 5)) == "LLLLLLLR");
    CHECK(format_itinerary(map, single_round_itinerary(ex, Branch::Y, 5)) == "LLLLLLRR");
}

TEST_CASE("period-8 single-round orbits exist past the corner only") {
    const auto ex = case_excursion(1.35);
    for (auto branch : {Branch::X, Branch::Y}) {
        const auto map = make_normal_form(at_delta(1.45));
        const auto fam = find_single_round(map, ex, branch, 5);
        CHECK(fam.orbit.period() == 8);
        CHECK(fam.orbit.admissible());
        CHECK(fam.orbit.closure_residual < 1e-9);

        const auto below = find_single_round(make_normal_form(at_delta(1.0)), ex, branch, 5);
        CHECK(below.orbit.margin < 0.0);
    }
}

TEST_CASE("both branches meet at the border collision") {
    const auto ex = case_excursion(1.35);
    const auto map = make_normal_form(at_delta(1.35));
    const auto itin = single_round_itinerary(ex, Branch::X, 5);
    BcbOptions o;
    o.bracket = std::make_pair(1.0, 1.45);
    const auto bcb = locate_bcb(delta_family(), itin, 5 + ex.split, o);
    CHECK(bcb.xi < 1.35);
    CHECK(std::abs(bcb.switching_point.x) < 1e-9);
    const auto at = make_normal_form(at_delta(bcb.xi));
    const auto x = solve_periodic(at, single_round_itinerary(ex, Branch::X, 5));
    const auto y = solve_periodic(at, single_round_itinerary(ex, Branch::Y, 5));
    for (std::size_t i = 0; i < 8; ++i) CHECK(distance(x.points[i], y.points[i]) < 1e-8);

    BcbOptions bad;
    bad.bracket = std::make_pair(1.40, 1.45);
    CHECK_THROWS_AS(locate_bcb(delta_family(), itin, 5 + ex.split, bad), BracketError);
}

TEST_CASE("successive border collisions approach the corner geometrically") {
    BcbSequenceOptions o;
    o.n_min = 8;
    o.n_max = 10;
    o.both_branches = false;
    const auto seq = bcb_sequence(o);
    REQUIRE(seq.complete());
    REQUIRE(seq.ratios.size() == 2);
    for (const auto& r : seq.ratios) CHECK(r.ratio == doctest::Approx(1.5).epsilon(0.15));
}

TEST_CASE("synthetic map border collision matches the closed form") {
    UnfoldingParams u;
    const auto oracle = synthetic_oracle(u, 5);
    CHECK(oracle.xi_k == doctest::Approx(0.100437242798).epsilon(1e-11));
    const auto bcb = locate_synthetic_bcb(u, 5);
    CHECK(std::abs(bcb.xi - oracle.xi_k) < 1e-12);
}

TEST_CASE("synthetic spectral radius grows like sigma^k") {
    UnfoldingParams u;
    std::vector<double> ks, logs;
    for (std::size_t k = 8; k <= 20; ++k) {
        const auto xi = synthetic_oracle(u, k).xi_k;
        const auto map = build_synthetic_map(u, k, xi);
        const auto f = affine_piece_fixed_point(map, 0);
        ks.push_back(static_cast<double>(k));
        logs.push_back(std::log(std::abs(f.eig_large)));
    }
    CHECK(regression_slope(ks, logs) == doctest::Approx(std::log(u.sigma)).epsilon(0.02));
}

TEST_CASE("no stable orbits near the corner") {
    const ParameterWindow window{1.30, 1.40, 3};
    const auto report = scan_periodic_instability(delta_family(), kLeft, 2, 24, window, 1);
    CHECK(report.admissible.size() > 0);
    CHECK(report.flagged == 0);
    for (const auto& e : report.admissible) CHECK(e.spectral_radius > 1.0);
}

TEST_CASE("multi-round enumeration") {
    const auto one = enumerate_multi_round(1, 12, 3);
    CHECK(one.size() == 2 * (12 - 3));  // k = 1..9, two branches
    for (const auto& s : enumerate_multi_round(2, 14, 3)) {
        CHECK(s.rounds() >= 1);
        for (auto k : s.ks) CHECK(k >= 1);
    }
}

TEST_CASE("property: cyclic rotation leaves the orbit unchanged") {
    gen::Rng rng(31);
    int solved = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto map = make_normal_form(rng.normal_form());
        Itinerary w;
        const int len = rng.integer(1, 9);
        for (int i = 0; i < len; ++i) w.letters.push_back(rng.coin() ? kRight : kLeft);
        PeriodicOrbit a;
        try {
            a = solve_periodic(map, w);
        } catch (const NoFixedPointError&) {
            continue;
        }
        const double scale = 1.0 + std::abs(a.trace);
        if (std::abs(a.eig_large - 1.0) < 1e-3 || std::abs(a.eig_small - 1.0) < 1e-3) continue;
        ++solved;
        const auto b = solve_periodic(map, rotate(w, static_cast<std::size_t>(rng.integer(1, len))));
        CHECK(std::abs(a.trace - b.trace) <= 1e-12 * scale);
        // det is formed as ad - bc, so its rounding scales with the entries
        CHECK(std::abs(a.det - b.det) <= 1e-12 * std::max(1.0, scale * scale));
        double size = 1.0;
        for (auto p : a.points) size = std::max(size, norm(p));
        CHECK(hausdorff(a.points, b.points) <= 1e-9 * size);
        CHECK(a.closure_residual <= 1e-9 * size);
    }
    CHECK(solved > 200);
}

TEST_CASE("property: determinant is the product of the deltas") {
    gen::Rng rng(32);
    for (int trial = 0; trial < 300; ++trial) {
        auto p = rng.normal_form();
        if (std::abs(p.delta_L * p.delta_R) >= 1.0) p.delta_R = 0.5 / p.delta_L;
        const auto map = make_normal_form(p);
        Itinerary w;
        double det = 1.0;
        const int len = rng.integer(1, 12);
        for (int i = 0; i < len; ++i) {
            const bool right = rng.coin();
            w.letters.push_back(right ? kRight : kLeft);
            det *= right ? p.delta_R : p.delta_L;
        }
        const auto c = compose_along(map, w, {0.0, 0.0});
        const auto& j = c.jacobian;
        const double scale = (std::abs(j.a) + std::abs(j.b)) * (std::abs(j.c) + std::abs(j.d));
        CHECK(std::abs(j.det() - det) <= 1e-12 * std::max(std::abs(det), scale));
    }
}
