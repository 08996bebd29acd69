#include <cmath>
#include <functional>
#include <numbers>

#include "doctest.h"

#include "corner/homoclinic.hpp"
#include "corner/manifolds.hpp"
#include "corner/normal_form.hpp"

using namespace corner;

namespace {

NormalFormParams at_delta(double delta_R) { return {2.0, 0.75, -0.6, delta_R, 1.0}; }

double point_to_polyline(Vec2 p, const std::vector<Vec2>& line) {
    double best = INFINITY;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        best = std::min(best, segment_distance(p, p, line[i], line[i + 1]).distance);
    }
    return best;
}

// Whether q has a chain of `steps` region-consistent preimages ending on x = 0.
bool backtracks_to_switching(const NormalFormParams& p, Vec2 q, int steps) {
    if (steps == 0) return std::abs(q.x) <= 1e-8;
    for (auto side : {NfSide::Left, NfSide::Right}) {
        const Vec2 pre = invert_piece(p, side, q);
        const bool ok = side == NfSide::Left ? pre.x <= 1e-9 : pre.x >= -1e-9;
        if (ok && backtracks_to_switching(p, pre, steps - 1)) return true;
    }
    return false;
}

struct Separation {
    double distance = INFINITY;
    std::size_t crossings = 0;
};

Separation separation(double delta_R) {
    const auto map = make_normal_form(at_delta(delta_R));
    const auto s = saddle_of_piece(map, kLeft);
    const auto set = grow_manifolds(map, s, GrowthBudget{}, 1);
    std::vector<std::vector<Vec2>> us, ss;
    for (const auto* u : {&set.unstable_plus, &set.unstable_minus}) us.push_back(beyond_radius(u->vertices, s.point, 0.5));
    for (const auto* st : {&set.stable_plus, &set.stable_minus}) {
        for (const auto& piece : st->pieces) ss.push_back(beyond_radius(piece.vertices, s.point, 0.5));
    }
    Separation out;
    for (const auto& u : us) {
        for (const auto& st : ss) {
            if (u.size() < 2 || st.size() < 2) continue;
            out.distance = std::min(out.distance, polyline_min_distance(u, st).distance);
            out.crossings += transverse_intersections(u, st).size();
        }
    }
    return out;
}

}  // namespace

TEST_CASE("first kink of the unstable manifold") {
    const auto map = make_normal_form(at_delta(1.35));
    const auto s = saddle_of_piece(map, kLeft);
    const auto u = grow_unstable(map, s, GrowthBudget{}, 1);
    CHECK(distance(u.vertices.front(), s.point) == doctest::Approx(1e-6).epsilon(1e-6));
    std::size_t first = 0;
    while (first < u.size() && !u.kink[first]) ++first;
    REQUIRE(first < u.size());
    CHECK(distance(u.vertices[first], {2.0, 0.0}) < 1e-12);
    CHECK(u.kink_generation[first] == 1);
    CHECK(point_to_polyline({0.0, 1.0}, u.vertices) < 1e-12);
}

TEST_CASE("a smooth map has no kinks") {
    const auto map = make_normal_form({2.0, 0.75, 2.0, 0.75, 1.0});
    const auto s = saddle_of_piece(map, kLeft);
    GrowthBudget b;
    b.max_generations = 30;
    const auto u = grow_unstable(map, s, b, 1);
    CHECK(u.kink_count() == 0);
    const auto st = grow_stable(map, s, b, 1);
    CHECK(st.kink_count() == 0);
    // straight along the eigenlines
    for (auto v : u.vertices) CHECK(std::abs(cross(v - s.point, s.v_u)) < 1e-9 * std::max(1.0, norm(v - s.point)));
    for (const auto& piece : st.pieces) {
        for (auto v : piece.vertices) CHECK(std::abs(cross(v - s.point, s.v_s)) < 1e-9 * std::max(1.0, norm(v - s.point)));
    }
}

TEST_CASE("stable growth starts along the stable eigenline") {
    const auto map = make_normal_form(at_delta(1.35));
    const auto s = saddle_of_piece(map, kLeft);
    const auto st = grow_stable(map, s, GrowthBudget{}, 1);
    REQUIRE(!st.pieces.empty());
    const auto v = st.pieces.front().vertices.front();
    CHECK(std::abs(cross(v - s.point, canonical_direction({2.0, -3.0}))) < 1e-15);
}

TEST_CASE("kink count grows with the generation budget") {
    const auto map = make_normal_form(at_delta(1.35));
    const auto s = saddle_of_piece(map, kLeft);
    std::size_t previous = 0;
    for (std::size_t g = 5; g <= 40; g += 5) {
        GrowthBudget b;
        b.seed_distance = 1e-2;
        b.max_generations = g;
        const auto kinks = grow_unstable(map, s, b, 1).kink_count();
        CHECK(kinks >= previous);
        previous = kinks;
    }
    CHECK(previous > 10);
}

TEST_CASE("unstable manifold properties") {
    for (double d : {1.25, 1.35, 1.45}) {
        CAPTURE(d);
        const auto p = at_delta(d);
        const auto map = make_normal_form(p);
        const auto s = saddle_of_piece(map, kLeft);
        GrowthBudget b;
        b.seed_distance = 1e-2;
        b.max_generations = 40;
        const auto u = grow_unstable(map, s, b, 1);
        CHECK(u.kink_count() > 10);

        // invariance: images lie on the polyline, except those landing in the
        // last generation, which the arclength budget cuts short
        const int last = u.generation.back();
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u.generation[i] + 1 >= last) continue;
            CHECK(point_to_polyline(map.evaluate(u.vertices[i]).image, u.vertices) <= 1e-8);
        }

        // kinks back-track to the switching line
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (!u.kink[i] || u.kink_generation[i] > 12) continue;
            CHECK(backtracks_to_switching(p, u.vertices[i], u.kink_generation[i]));
        }

        // straight between kinks
        std::size_t start = 0;
        for (std::size_t i = 1; i < u.size(); ++i) {
            if (!u.kink[i] && i + 1 < u.size()) continue;
            for (std::size_t j = start + 1; j < i; ++j) {
                const Vec2 a = u.vertices[start], c = u.vertices[i];
                const double off = std::abs(cross(c - a, u.vertices[j] - a)) / norm(c - a);
                CHECK(off <= 1e-10);
            }
            start = i;
        }

        // each crossing in one generation becomes a kink in the next
        for (std::size_t g = 1; g < u.new_kinks_per_generation.size(); ++g) {
            CHECK(u.new_kinks_per_generation[g] == u.crossings_per_generation[g - 1]);
        }
    }
}

TEST_CASE("the stable manifold is forward invariant") {
    const auto map = make_normal_form(at_delta(1.35));
    const auto s = saddle_of_piece(map, kLeft);
    GrowthBudget b;
    b.seed_distance = 1e-2;
    b.max_generations = 14;
    const auto st = grow_stable(map, s, b, 1);
    REQUIRE(st.pieces.size() > 1);
    std::size_t checked = 0;
    for (const auto& piece : st.pieces) {
        for (auto v : piece.vertices) {
            const Vec2 image = map.evaluate(v).image;
            if (distance(image, s.point) <= b.seed_distance) continue;  // inside the seed segment
            double best = INFINITY;
            for (const auto& other : st.pieces) best = std::min(best, point_to_polyline(image, other.vertices));
            CHECK(best <= 1e-6);
            ++checked;
        }
    }
    CHECK(checked > 10);
}

TEST_CASE("manifolds separate before the corner and cross after it") {
    const auto before = separation(1.25);
    CHECK(before.distance > 1e-3);
    CHECK(before.crossings == 0);
    const auto after = separation(1.45);
    CHECK(after.distance < 1e-12);
    CHECK(after.crossings > 0);
}

TEST_CASE("segment distance and crossings") {
    const std::vector<Vec2> a{{-1.0, 0.0}, {1.0, 0.0}};
    const std::vector<Vec2> b{{0.0, -1.0}, {0.0, 1.0}};
    const auto c = transverse_intersections(a, b);
    REQUIRE(c.size() == 1);
    CHECK(c[0].angle == doctest::Approx(std::numbers::pi / 2));
    CHECK(c[0].point == Vec2{0.0, 0.0});
    CHECK(polyline_min_distance(a, a).distance == 0.0);

    const std::vector<Vec2> shifted{{-1.0, 0.5}, {1.0, 0.5}};
    const auto w = polyline_min_distance(a, shifted);
    CHECK(w.distance == doctest::Approx(0.5));
    CHECK(transverse_intersections(a, shifted).empty());

    // nearly tangential touches are skipped
    const std::vector<Vec2> shallow{{-1.0, -1e-9}, {1.0, 1e-9}};
    CHECK(transverse_intersections(a, shallow).empty());
}

TEST_CASE("manifolds of the reduced map cross transversally") {
    const auto map = make_reduced_normal_form({-4.0, 0.4, 4.0, 0.4}, -1.0);
    const auto s = saddle_of_piece(map, 1);
    CHECK(s.sigma > 1.0);
    const auto set = grow_manifolds(map, s, GrowthBudget{}, 1);
    std::size_t crossings = 0;
    for (const auto* u : {&set.unstable_plus, &set.unstable_minus}) {
        for (const auto* st : {&set.stable_plus, &set.stable_minus}) {
            for (const auto& piece : st->pieces) {
                crossings += transverse_intersections(beyond_radius(u->vertices, s.point, 0.05),
                                                      beyond_radius(piece.vertices, s.point, 0.05)).size();
            }
        }
    }
    CHECK(crossings > 0);
}

TEST_CASE("crossings persist when the budget doubles") {
    const auto map = make_normal_form(at_delta(1.45));
    const auto s = saddle_of_piece(map, kLeft);
    GrowthBudget small;
    small.seed_distance = 1e-2;
    small.max_generations = 20;
    GrowthBudget big = small;
    big.max_generations = 40;
    auto count = [&](const GrowthBudget& b, double len) {
        const auto u = grow_unstable(map, s, b, 1);
        const auto st = grow_stable(map, s, small, 1);
        // truncate the unstable branch to the common arclength
        std::vector<Vec2> cut{u.vertices.front()};
        double acc = 0.0;
        for (std::size_t i = 1; i < u.size() && acc < len; ++i) {
            acc += distance(u.vertices[i - 1], u.vertices[i]);
            cut.push_back(u.vertices[i]);
        }
        std::size_t n = 0;
        for (const auto& piece : st.pieces) n += transverse_intersections(beyond_radius(cut, s.point, 0.5), beyond_radius(piece.vertices, s.point, 0.5)).size();
        return n;
    };
    const double len = grow_unstable(map, s, small, 1).arclength();
    const auto n = count(small, len);
    CHECK(n > 0);
    CHECK(count(big, len) == n);
}
