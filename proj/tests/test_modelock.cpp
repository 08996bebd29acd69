#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "gen.hpp"

#include "corner/modelock.hpp"
#include "corner/normal_form.hpp"

using namespace corner;

namespace {

std::string letters(const Itinerary& w) {
    std::string s;
    for (auto c : w.letters) s += c == kLeft ? 'L' : 'R';
    return s;
}

std::size_t totient_sum(std::size_t cap) {
    std::size_t total = 0;
    for (std::size_t n = 2; n <= cap; ++n) {
        for (std::size_t m = 1; m < n; ++m) total += std::gcd(m, n) == 1 ? 1 : 0;
    }
    return total;
}

TongueScanOptions small_scan(std::size_t cap) {
    TongueScanOptions o;
    o.grid = {41, 31, -1.5, 1.5, 0.0, 1.6};
    o.period_cap = cap;
    return o;
}

}  // namespace

TEST_CASE("rotational words") {
    CHECK(letters(rotational_word(1, 2).word) == "LR");
    const auto w = rotational_word(2, 5);
    CHECK(letters(w.word) == "LLRLR");
    CHECK(std::count(w.word.letters.begin(), w.word.letters.end(), kRight) == 2);
    CHECK(w.l == 3);
    CHECK(letters(rotational_word(6, 1, 8).word) == "LLLLLLRR");
    CHECK(enumerate_rotational(30).size() == totient_sum(30));
    for (const auto& r : enumerate_rotational(12)) {
        CHECK(std::gcd(r.m, r.n) == 1);
        CHECK(r.word.size() == r.n);
        CHECK(static_cast<std::size_t>(std::count(r.word.letters.begin(), r.word.letters.end(), kRight)) == r.m);
    }
}

TEST_CASE("full family has one word per cyclic class") {
    const auto all = enumerate_rotational_all(12);
    CHECK(all.size() > enumerate_rotational(12).size());
    std::vector<std::string> seen;
    for (const auto& r : all) {
        auto s = letters(r.word);
        std::string least = s;
        for (std::size_t k = 1; k < s.size(); ++k) least = std::min(least, s.substr(k) + s.substr(0, k));
        seen.push_back(least);
    }
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    // the single-round words L^(n-2) RR are all present
    for (std::size_t n = 4; n <= 12; ++n) {
        const std::string target = std::string(n - 2, 'L') + "RR";
        CHECK(std::find(seen.begin(), seen.end(), target) != seen.end());
    }
}

TEST_CASE("expanding cells are empty") {
    const auto words = enumerate_rotational_all(20);
    // both determinants exceed one, so no composition can have spectral radius below one
    const auto cell = classify_cell({2.0, 1.1, 0.3, 1.2, 1.0}, words);
    CHECK(cell.period == 0);
}

TEST_CASE("a stable fixed point is found as period one") {
    // the right piece has a stable focus; no rotational word of length >= 2 is stable here
    const auto cell = classify_cell({2.0, 0.75, 0.5, 0.5, 1.0}, enumerate_rotational_all(10));
    CHECK(cell.period <= 1);
}

TEST_CASE("raising the period cap only adds cells") {
    const auto low = scan_tongues(small_scan(10));
    const auto high = scan_tongues(small_scan(20));
    REQUIRE(low.size() == high.size());
    std::size_t added = 0;
    for (std::size_t c = 0; c < low.size(); ++c) {
        if (low[c].period > 0) CHECK(high[c].period >= low[c].period);
        if (low[c].period == 0 && high[c].period > 0) ++added;
    }
    CHECK(added > 0);
}

TEST_CASE("rotating the words leaves the recorded orbit") {
    gen::Rng rng(51);
    const auto words = enumerate_rotational_all(12);
    auto rotated = words;
    for (auto& w : rotated) w.word = rotate(w.word, static_cast<std::size_t>(rng.integer(0, static_cast<int>(w.n) - 1)));
    const auto cells = scan_tongues(small_scan(12));
    for (const auto& c : cells) {
        const NormalFormParams p{2.0, 0.75, c.tau_R, c.delta_R, 1.0};
        const auto again = classify_cell(p, rotated);
        CHECK(again.period == c.period);
        CHECK(again.m == c.m);
        CHECK(again.l == c.l);
        if (c.period > 0) CHECK(again.spectral_radius == doctest::Approx(c.spectral_radius));
    }
}

TEST_CASE("margin and stability shrink toward a tongue edge") {
    TongueScanOptions o;
    o.grid = {601, 1, -1.5, 1.5, 1.0, 1.0};
    o.period_cap = 6;
    const auto cells = scan_tongues(o);
    auto same = [&](std::size_t a, std::size_t b) {
        return cells[a].period == cells[b].period && cells[a].m == cells[b].m && cells[a].l == cells[b].l;
    };
    // longest run of one recorded word along the transect
    std::size_t first = 0, last = 0;
    for (std::size_t i = 0; i < cells.size();) {
        std::size_t j = i;
        while (j + 1 < cells.size() && same(i, j + 1)) ++j;
        if (cells[i].period > 0 && j - i > last - first) first = i, last = j;
        i = j + 1;
    }
    REQUIRE(last - first >= 4);
    auto slack = [&](std::size_t i) { return std::min(cells[i].margin, 1.0 - cells[i].spectral_radius); };
    double inner = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
        CHECK(cells[i].margin >= -1e-10);
        CHECK(cells[i].spectral_radius < 1.0);
        inner = std::max(inner, slack(i));
    }
    CHECK(slack(first) < inner);
    CHECK(slack(last) < inner);
}

TEST_CASE("simulation lands on the recorded orbit") {
    auto o = small_scan(12);
    const auto cells = scan_tongues(o);
    const auto check = check_convergence(o, cells, 50, 7);
    CHECK(check.sampled == 50);
    CHECK(check.fraction() >= 0.9);
}

TEST_CASE("scans do not depend on the worker count") {
    auto o = small_scan(15);
    o.workers = 1;
    const auto a = scan_tongues(o);
    o.workers = 3;
    const auto b = scan_tongues(o);
    REQUIRE(a.size() == b.size());
    for (std::size_t c = 0; c < a.size(); ++c) {
        CHECK(a[c].period == b[c].period);
        CHECK(a[c].point == b[c].point);
    }
}

TEST_CASE("nested discs") {
    std::vector<TongueCell> cells(3);
    cells[0] = {0, 0, 0.0, 0.3, 4};
    cells[1] = {1, 0, 0.0, 0.1, 6};
    cells[2] = {2, 0, 0.0, 0.02, 9};
    const auto a = tongue_accumulation(cells, {0.0, 0.0}, {0.4, 0.2, 0.05});
    CHECK(a.min_period == std::vector<std::size_t>{4, 6, 9});
    CHECK(a.accumulates());
    const auto b = tongue_accumulation(cells, {0.0, 0.0}, {0.4, 0.2, 0.05, 0.01});
    CHECK_FALSE(b.accumulates());
}
