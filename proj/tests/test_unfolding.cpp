#include <cmath>

#include "doctest.h"
#include "gen.hpp"

#include "corner/errors.hpp"
#include "corner/experiments.hpp"
#include "corner/periodic.hpp"
#include "corner/unfolding.hpp"

using namespace corner;

namespace {

bool has_failure(const GenericityReport& r, const std::string& name) {
    for (const auto& c : r.conditions) {
        if (c.name == name) return !c.pass;
    }
    FAIL("no condition named " << name);
    return false;
}

}  // namespace

TEST_CASE("genericity conditions") {
    UnfoldingParams u;
    const auto ok = validate_genericity(u);
    CHECK(ok.ok());
    CHECK(ok.failures().empty());

    auto corner = u;
    corner.bX2 = 1.0;
    const auto r = validate_genericity(corner);
    CHECK_FALSE(r.ok());
    CHECK(r.failures() == "corner");
    CHECK(has_failure(r, "corner"));

    auto wet = u;
    wet.sigma = 2.4;  // lambda sigma = 1.2
    CHECK(has_failure(validate_genericity(wet), "dissipative"));

    auto flat = u;
    flat.a2 = 0.0;
    CHECK(has_failure(validate_genericity(flat), "transverse_unstable"));
    auto fixed = u;
    fixed.c2 = 0.0;
    CHECK(has_failure(validate_genericity(fixed), "unfolding_parameter"));
    CHECK_THROWS_AS(predict(fixed, 5, 0.0), GenericityError);
}

TEST_CASE("leading-order predictions") {
    UnfoldingParams u;
    const auto p = predict(u, 5, 0.0);
    CHECK(p.xi_k == doctest::Approx(std::pow(1.5, -5)));
    CHECK(p.xi_k == doctest::Approx(0.131687).epsilon(1e-6));
    CHECK(p.X.trace == doctest::Approx(-7.59375));
    CHECK(p.X.gamma_u == doctest::Approx(-7.59375));

    gen::Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const auto v = random_unfolding_params(static_cast<std::uint64_t>(trial));
        const std::size_t k = static_cast<std::size_t>(rng.integer(1, 20));
        const auto q = predict(v, k, 0.0);
        const double scale = std::pow(v.lambda * v.sigma, static_cast<double>(k));
        CHECK(q.X.det / scale == doctest::Approx(v.a1 * v.bX2 - v.a2 * v.bX1));
        CHECK(q.Y.det / scale == doctest::Approx(v.a1 * v.bY2 - v.a2 * v.bY1));
    }
}

TEST_CASE("synthetic oracle and numeric collision agree") {
    UnfoldingParams u;
    const auto o = synthetic_oracle(u, 5);
    CHECK(o.xi_k == doctest::Approx(std::pow(1.5, -5) - std::pow(0.5, 5)));
    CHECK(std::abs(locate_synthetic_bcb(u, 5).xi - o.xi_k) < 1e-12);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto v = random_unfolding_params(seed);
        for (std::size_t k = 6; k <= 14; k += 4) {
            const double xi = 0.9 * synthetic_oracle(v, k).xi_k;
            const auto map = build_synthetic_map(v, k, xi);
            for (auto b : {Branch::X, Branch::Y}) {
                const auto f = affine_piece_fixed_point(map, b == Branch::X ? 0 : 1);
                const auto exact = synthetic_fixed_point(v, k, xi, b);
                CHECK(distance(f.point, exact) <= 1e-12 * std::max(1.0, norm(exact)));
            }
        }
    }
}

TEST_CASE("quadratic terms move the collision by sigma^-2k") {
    UnfoldingParams u;
    QuadraticRemainder rem;
    rem.first = {0.01, -0.01, 0.005, 0.01, 0.01, 0.01};
    rem.second = {-0.01, 0.01, 0.01, 0.005, -0.01, 0.01};
    std::vector<double> ks, logs;
    for (std::size_t k = 10; k <= 20; ++k) {
        const double dev = locate_synthetic_bcb(u, k, rem).xi - synthetic_oracle(u, k).xi_k;
        ks.push_back(static_cast<double>(k));
        logs.push_back(std::log(std::abs(dev)));
    }
    CHECK(regression_slope(ks, logs) == doctest::Approx(-2.0 * std::log(u.sigma)).epsilon(0.10));
}

TEST_CASE("hatted coordinates") {
    UnfoldingParams u;
    for (auto [k, tol] : {std::pair{8u, 0.05}, std::pair{12u, 0.02}, std::pair{16u, 0.01}}) {
        const auto h = hatted_transform(u, k);
        CHECK(std::abs(h.a2 / (u.a2 * std::pow(u.sigma, k)) - 1.0) <= tol);
        const auto map = h.map(0.0);
        CHECK(distance(map.piece(0)({0.0, 0.0}), {0.0, 0.0}) < 1e-12);
        CHECK(distance(map.piece(1)({0.0, 0.0}), {0.0, 0.0}) < 1e-12);
        for (double x : {-3.0, -0.1, 0.0, 0.7, 5.0}) CHECK(map.continuity_defect({x, 0.0}) == 0.0);
    }
}

TEST_CASE("tilded coordinates give the reduced normal form") {
    UnfoldingParams u;
    const auto h = hatted_transform(u, 8);
    const auto t = tilded_transform(h);
    for (auto b : {Branch::X, Branch::Y}) {
        const auto a = h.linear_part(b);
        const double tau = b == Branch::X ? t.params.tauX : t.params.tauY;
        const double delta = b == Branch::X ? t.params.deltaX : t.params.deltaY;
        CHECK(std::abs(tau - a.trace()) <= 1e-12 * std::abs(a.trace()));
        CHECK(std::abs(delta - a.det()) <= 1e-12 * std::max(1.0, std::abs(a.det())));
        // P A P^-1 is the companion form
        const auto c = t.P * a * t.P.inverse();
        CHECK(c.a == doctest::Approx(tau));
        CHECK(std::abs(c.b - 1.0) < 1e-10);
        CHECK(c.c == doctest::Approx(-delta));
        CHECK(std::abs(c.d) < 1e-10);
    }
    const auto p = predict(u, 8, 0.0);
    CHECK(t.params.tauX == doctest::Approx(p.X.trace).epsilon(0.03));
    CHECK(t.params.deltaX == doctest::Approx(p.X.det).epsilon(0.03));

    auto blind = h;
    blind.c2 = 0.0;
    CHECK_THROWS_AS(tilded_transform(blind), NonObservableError);
    auto flat = h;
    flat.a2 = 0.0;
    CHECK_THROWS_AS(tilded_transform(flat), NonObservableError);
}

TEST_CASE("round trip through the tilded coordinates") {
    const auto t = tilded_transform(hatted_transform(UnfoldingParams{}, 10));
    gen::Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        const Vec2 p = rng.point(3.0);
        const double xi = rng.uniform(-1.0, 1.0);
        CHECK(distance(t.inverse(t.forward(p, xi), xi), p) <= 1e-10);
    }
}

TEST_CASE("sign quadrants") {
    const auto table = quadrant_table();
    REQUIRE(table.size() == 4);
    for (const auto& q : table) {
        CHECK(q.bcb_side == q.sign_c2);
        CHECK(q.existence_side == q.sign_bX2 * q.sign_c2);
        UnfoldingParams u;
        u.c2 = q.sign_c2;
        u.bX2 = q.sign_bX2;
        u.bY2 = -q.sign_bX2;
        CHECK(observe_quadrant(u, 10) == q);
    }
}

TEST_CASE("eigenvalue asymptotics at k = 12") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto u = random_unfolding_params(seed);
        ValidationOptions o;
        const auto d = validate_draw(u, seed, o);
        CHECK(d.eigen_u_error <= 0.02);
        CHECK(d.eigen_s_error <= 0.02);
        CHECK(d.oracle_error <= 1e-10);
    }
}

TEST_CASE("scaling fit recovers exact coefficients") {
    const double lambda = 0.4, sigma = 1.7;
    std::vector<std::size_t> ks;
    std::vector<double> devs;
    for (std::size_t k = 6; k <= 14; ++k) {
        ks.push_back(k);
        devs.push_back(0.3 * std::pow(lambda, k) - 2.0 * std::pow(sigma, -2.0 * static_cast<double>(k)));
    }
    const auto f = fit_scaling(ks, devs, lambda, sigma);
    CHECK(f.C1 == doctest::Approx(0.3));
    CHECK(f.C2 == doctest::Approx(-2.0));
    CHECK(f.residual < 1e-9);
}

TEST_CASE("random draws are reproducible and generic") {
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto a = random_unfolding_params(split_seed(7, s));
        CHECK(a == random_unfolding_params(split_seed(7, s)));
        CHECK(validate_genericity(a).ok());
    }
    CHECK(split_seed(7, 0) != split_seed(7, 1));
    CHECK(split_seed(7, 0) != split_seed(8, 0));
}
