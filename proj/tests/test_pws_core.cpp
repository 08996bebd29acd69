#include <cmath>
#include <limits>

#include "doctest.h"
#include "gen.hpp"

#include "corner/errors.hpp"
#include "corner/normal_form.hpp"
#include "corner/pws_map.hpp"

using namespace corner;

namespace {

const NormalFormParams kCase{2.0, 0.75, -0.6, 1.35, 1.0};

bool near(Vec2 a, Vec2 b, double tol) { return distance(a, b) <= tol; }

}  // namespace

TEST_CASE("normal form evaluates piece by piece") {
    const auto map = make_normal_form(kCase);
    auto e = map.evaluate({0.0, 5.0});
    CHECK(e.image == Vec2{6.0, 0.0});
    CHECK(e.label == kLeft);  // the switching line goes to the smallest label

    e = map.evaluate({-4.0, 3.0});
    CHECK(near(e.image, {-4.0, 3.0}, 1e-15));

    e = map.evaluate({2.0, 0.0});
    CHECK(e.label == kRight);
    CHECK(near(e.image, {-0.2, -2.7}, 1e-14));
}

TEST_CASE("labels on the switching line") {
    const auto map = make_normal_form(kCase);
    CHECK(map.labels_at({0.0, 1.0}).size() == 2);
    CHECK(map.labels_at({-1e-3, 1.0}).size() == 1);
    CHECK(map.labels_at({-1e-3, 1.0}, 1e-2).size() == 2);
    CHECK(map.region_of({1.0, 0.0}) == kRight);
    CHECK(map.margin(kRight, {-0.5, 0.0}) == doctest::Approx(-0.5));
}

TEST_CASE("non-finite points are rejected") {
    const auto map = make_normal_form(kCase);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(map.evaluate({nan, 0.0}), InvalidPointError);
    CHECK_THROWS_AS(map.region_of({0.0, std::numeric_limits<double>::infinity()}), InvalidPointError);
}

TEST_CASE("compose along words") {
    const auto map = make_normal_form(kCase);
    const auto one = compose_along(map, parse_itinerary(map, "L"), {0.0, 1.0});
    CHECK(one.point == Vec2{2.0, 0.0});
    CHECK(one.jacobian == Mat2{2.0, 1.0, -0.75, 0.0});

    const auto two = compose_along(map, parse_itinerary(map, "RL"), {0.0, 1.0});
    CHECK(near(two.point, {5.0, -1.5}, 1e-14));

    // (0, 1) -> (2, 0) -> (-0.2, -2.7) -> (-2.1, 0.15)
    const auto three = compose_along(map, parse_itinerary(map, "LRL"), {0.0, 1.0});
    CHECK(near(three.point, {-2.1, 0.15}, 1e-13));
    const auto same = compose_along(map, parse_itinerary(map, "RRL"), {0.0, 1.0});
    CHECK(near(same.point, three.point, 1e-15));
    CHECK(three.jacobian.det() == doctest::Approx(0.75 * 1.35 * 0.75));
}

TEST_CASE("itinerary helpers") {
    const auto map = make_normal_form(kCase);
    const auto w = parse_itinerary(map, "LLR");
    CHECK(format_itinerary(map, w) == "LLR");
    CHECK(format_itinerary(map, rotate(w, 1)) == "LRL");
    CHECK(format_itinerary(map, concat(repeat(kLeft, 2), w)) == "LLLLR");
    CHECK_THROWS(parse_itinerary(map, "LQ"));
}

TEST_CASE("property: chain rule along random words") {
    gen::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto map = make_normal_form(rng.normal_form());
        Itinerary w;
        const int len = rng.integer(1, 8);
        for (int i = 0; i < len; ++i) w.letters.push_back(rng.coin() ? kRight : kLeft);
        const Vec2 p = rng.point(2.0);
        const auto c = compose_along(map, w, p);
        Mat2 j = Mat2::identity();
        Vec2 q = p;
        for (auto letter : w.letters) {
            j = map.jacobian(letter, q) * j;
            q = map.piece(letter)(q);
        }
        CHECK(c.point == q);
        CHECK(c.jacobian.a == doctest::Approx(j.a));
        CHECK(c.jacobian.d == doctest::Approx(j.d));
        double det = 1.0;
        for (auto letter : w.letters) det *= map.jacobian(letter, p).det();
        CHECK(c.jacobian.det() == doctest::Approx(det).epsilon(1e-9));
    }
}

TEST_CASE("property: pieces agree on the switching line") {
    gen::Rng rng(12);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto map = make_normal_form(rng.normal_form());
        const Vec2 p{0.0, rng.uniform(-10.0, 10.0)};
        CHECK(map.continuity_defect(p) <= 1e-12);
        CHECK(map.piece(kLeft)(p) == map.piece(kRight)(p));
    }
}

TEST_CASE("property: iterate a then b equals iterate a + b") {
    gen::Rng rng(13);
    const auto map = make_normal_form(kCase);
    const auto attractor = iterate(map, {0.0, 0.0}, 2000);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec2 p = attractor.points[static_cast<std::size_t>(rng.integer(1000, 2000))];
        const auto a = static_cast<std::size_t>(rng.integer(0, 40));
        const auto b = static_cast<std::size_t>(rng.integer(0, 40));
        const auto whole = iterate(map, p, a + b);
        const auto first = iterate(map, p, a);
        const auto second = iterate(map, first.points.back(), b);
        REQUIRE(whole.points.size() == a + b + 1);
        CHECK(whole.points.back() == second.points.back());
        CHECK(whole.points[a] == first.points.back());
    }
}

TEST_CASE("orbits escape past the corner") {
    const auto map = make_normal_form({2.0, 0.75, -0.6, 1.45, 1.0});
    const auto orbit = iterate(map, {0.0, 0.0}, 100000, 1e6);
    CHECK(orbit.escaped);
    CHECK(orbit.points.size() == orbit.escape_index + 1);
    CHECK_THROWS_AS(lyapunov_exponent(map, {0.0, 0.0}, 100, 100000), EscapeError);
}

TEST_CASE("Lyapunov exponent sign") {
    const auto chaotic = make_normal_form(kCase);
    CHECK(lyapunov_exponent(chaotic, {0.0, 0.0}, 1000, 100000) > 0.1);

    // the right fixed point is a stable focus with modulus sqrt(0.5)
    const auto stable = make_normal_form({2.0, 0.75, 0.5, 0.5, 1.0});
    CHECK(lyapunov_exponent(stable, {0.5, 0.0}, 1000, 10000) ==
          doctest::Approx(0.5 * std::log(0.5)).epsilon(1e-3));
}

TEST_CASE("polynomial pieces") {
    // Henon-like piece on x >= 0 glued to a linear one
    Piece left{"A", Poly2::affine(1.0, 0.0, 1.0), Poly2::affine(0.0, 0.3, 0.0)};
    Poly2 fx = Poly2::affine(1.0, 0.0, 1.0);
    fx[3] = -1.4;
    Piece right{"B", fx, Poly2::affine(0.0, 0.3, 0.0)};
    PwsMap map({left, right}, {Poly2::affine(0.0, 1.0, 0.0)},
               {{Constraint{0, Side::NonPositive}}, {Constraint{0, Side::NonNegative}}});
    CHECK_FALSE(map.is_piecewise_affine());
    CHECK(map.continuity_defect({0.0, 0.7}) == 0.0);
    CHECK(map.evaluate({1.0, 0.5}).image.x == doctest::Approx(0.1));
    const auto j = map.jacobian(1, {1.0, 0.0});
    CHECK(j.a == doctest::Approx(-2.8));
    CHECK(affine_fixed_point({0.5, 0.0, 0.0, 0.5}, {1.0, 1.0}) == Vec2{2.0, 2.0});
    CHECK_THROWS_AS(affine_fixed_point(Mat2::identity(), {1.0, 0.0}), NoFixedPointError);
}
