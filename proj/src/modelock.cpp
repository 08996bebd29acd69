#include "corner/modelock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "corner/geometry.hpp"
#include "corner/parallel.hpp"

namespace corner {

RotationalWord rotational_word(std::size_t m, std::size_t n) {
    RotationalWord w{m, n, n - m, {}};
    w.word.letters.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool right = ((i + 1) * m) / n > (i * m) / n;
        w.word.letters[i] = right ? kRight : kLeft;
    }
    return w;
}

RotationalWord rotational_word(std::size_t l, std::size_t m, std::size_t n) {
    RotationalWord w{m, n, l, {}};
    w.word.letters.resize(n);
    for (std::size_t i = 0; i < n; ++i) w.word.letters[i] = (i * m) % n < l ? kLeft : kRight;
    return w;
}

std::vector<RotationalWord> enumerate_rotational(std::size_t period_cap) {
    std::vector<RotationalWord> out;
    for (std::size_t n = 2; n <= period_cap; ++n) {
        for (std::size_t m = 1; m < n; ++m) {
            if (std::gcd(m, n) == 1) out.push_back(rotational_word(m, n));
        }
    }
    return out;
}

namespace {

std::vector<std::size_t> least_rotation(const std::vector<std::size_t>& w) {
    std::vector<std::size_t> best = w;
    std::vector<std::size_t> r = w;
    for (std::size_t s = 1; s < w.size(); ++s) {
        std::rotate(r.begin(), r.begin() + 1, r.end());
        if (r < best) best = r;
    }
    return best;
}

}  // namespace

std::vector<RotationalWord> enumerate_rotational_all(std::size_t period_cap) {
    std::vector<RotationalWord> out;
    for (std::size_t n = 2; n <= period_cap; ++n) {
        std::set<std::vector<std::size_t>> seen;
        for (std::size_t m = 1; m < n; ++m) {
            if (std::gcd(m, n) != 1) continue;
            for (std::size_t l = 1; l < n; ++l) {
                RotationalWord w = rotational_word(l, m, n);
                if (seen.insert(least_rotation(w.word.letters)).second) out.push_back(std::move(w));
            }
        }
    }
    return out;
}

std::vector<RotationalWord> scan_words(const TongueScanOptions& o) {
    return o.sturmian_only ? enumerate_rotational(o.period_cap) : enumerate_rotational_all(o.period_cap);
}

namespace {

struct Affine {
    double a, b, c, d;  // linear part
    double e, f;        // offset
};

Affine piece(const NormalFormParams& p, std::size_t letter) {
    const double t = letter == kRight ? p.tau_R : p.tau_L;
    const double dl = letter == kRight ? p.delta_R : p.delta_L;
    return {t, 1.0, -dl, 0.0, p.mu, 0.0};
}

Vec2 apply(const Affine& m, Vec2 v) { return {m.a * v.x + m.b * v.y + m.e, m.c * v.x + m.d * v.y + m.f}; }

Vec2 step(const NormalFormParams& p, Vec2 v) {
    const bool right = v.x >= 0.0;
    const double t = right ? p.tau_R : p.tau_L;
    const double dl = right ? p.delta_R : p.delta_L;
    return {t * v.x + v.y + p.mu, -dl * v.x};
}

constexpr double kAdmissibleTol = 1e-10;
constexpr double kPrimitiveTol = 1e-9;

}  // namespace

TongueCell classify_cell(const NormalFormParams& params, const std::vector<RotationalWord>& words) {
    TongueCell best;
    best.tau_R = params.tau_R;
    best.delta_R = params.delta_R;
    const Affine L = piece(params, kLeft);
    const Affine R = piece(params, kRight);
    const double logdL = std::log(std::abs(params.delta_L));
    const double logdR = std::log(std::abs(params.delta_R));
    std::vector<Vec2> pts;
    for (const auto& w : words) {
        if (w.n <= best.period) continue;
        // |det| >= 1 rules out an attracting orbit before any composition.
        const double logdet = static_cast<double>(w.l) * logdL + static_cast<double>(w.n - w.l) * logdR;
        if (!(logdet < 0.0)) continue;
        Affine M{1, 0, 0, 1, 0, 0};
        for (std::size_t letter : w.word.letters) {
            const Affine& P = letter == kRight ? R : L;
            M = {P.a * M.a + P.b * M.c, P.a * M.b + P.b * M.d, P.c * M.a + P.d * M.c, P.c * M.b + P.d * M.d,
                 P.a * M.e + P.b * M.f + P.e, P.c * M.e + P.d * M.f + P.f};
        }
        const double tr = M.a + M.d;
        const double det = M.a * M.d - M.b * M.c;
        const double rho = spectral_radius(tr, det);
        if (!(rho < 1.0)) continue;
        const double den = (1.0 - M.a) * (1.0 - M.d) - M.b * M.c;
        if (den == 0.0) continue;
        const Vec2 p0{((1.0 - M.d) * M.e + M.b * M.f) / den, (M.c * M.e + (1.0 - M.a) * M.f) / den};
        pts.assign(1, p0);
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < w.n; ++i) {
            const std::size_t letter = w.word.letters[i];
            const double mg = letter == kRight ? pts.back().x : -pts.back().x;
            margin = std::min(margin, mg);
            if (margin < -kAdmissibleTol) break;
            if (i + 1 < w.n) pts.push_back(apply(letter == kRight ? R : L, pts.back()));
        }
        if (margin < -kAdmissibleTol) continue;
        // An orbit that repeats sooner (e.g. a fixed point on the switching
        // line) is not a genuine period-n orbit.
        bool primitive = true;
        for (std::size_t d = 1; d < w.n && primitive; ++d) {
            if (w.n % d == 0 && distance(pts[0], pts[d]) < kPrimitiveTol) primitive = false;
        }
        if (!primitive) continue;
        if (w.n > best.period) {
            best.period = w.n;
            best.m = w.m;
            best.l = w.l;
            best.margin = margin;
            best.spectral_radius = rho;
            best.point = p0;
        }
    }
    return best;
}

std::vector<TongueCell> scan_tongues(const TongueScanOptions& o) {
    auto words = scan_words(o);
    // Longest words first, so a found orbit prunes every shorter word.
    std::stable_sort(words.begin(), words.end(),
                     [](const RotationalWord& a, const RotationalWord& b) { return a.n > b.n; });
    const std::size_t nx = o.grid.nx;
    std::vector<TongueCell> cells(nx * o.grid.ny);
    parallel_for(o.grid.ny, o.workers, [&](std::size_t j) {
        NormalFormParams p{o.tau_L, o.delta_L, 0.0, o.grid.delta(j), o.mu};
        for (std::size_t i = 0; i < nx; ++i) {
            p.tau_R = o.grid.tau(i);
            TongueCell c = classify_cell(p, words);
            c.i = i;
            c.j = j;
            cells[j * nx + i] = c;
        }
    });
    return cells;
}

bool converges_to_recorded(const NormalFormParams& params, const TongueCell& cell, PlanarPoint start,
                           std::size_t transient, double tol) {
    if (cell.period == 0) return false;
    std::vector<Vec2> orbit{cell.point};
    for (std::size_t i = 1; i < cell.period; ++i) orbit.push_back(step(params, orbit.back()));
    Vec2 v = start;
    for (std::size_t i = 0; i < transient; ++i) {
        v = step(params, v);
        if (!is_finite(v)) return false;
    }
    // Distance to the recorded orbit as a set, checked over one full period.
    for (std::size_t i = 0; i < cell.period; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : orbit) best = std::min(best, distance(v, q));
        if (best >= tol) return false;
        v = step(params, v);
    }
    return true;
}

ConvergenceCheck check_convergence(const TongueScanOptions& o, const std::vector<TongueCell>& cells,
                                   std::size_t samples, std::uint64_t seed, std::size_t transient, double kick,
                                   double tol) {
    std::vector<std::size_t> tongue;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (cells[k].period > 0) tongue.push_back(k);
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> pick;
    if (tongue.size() <= samples) {
        pick = tongue;
    } else {
        std::sample(tongue.begin(), tongue.end(), std::back_inserter(pick), samples, rng);
    }
    std::vector<Vec2> starts(pick.size());
    for (auto& s : starts) {
        const double angle = 2.0 * M_PI * std::generate_canonical<double, 53>(rng);
        s = {kick * std::cos(angle), kick * std::sin(angle)};
    }
    std::vector<char> ok(pick.size(), 0);
    parallel_for(pick.size(), o.workers, [&](std::size_t s) {
        const TongueCell& c = cells[pick[s]];
        const NormalFormParams p{o.tau_L, o.delta_L, c.tau_R, c.delta_R, o.mu};
        ok[s] = converges_to_recorded(p, c, c.point + starts[s], transient, tol) ? 1 : 0;
    });
    ConvergenceCheck out;
    out.sampled = pick.size();
    out.converged = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 1));
    return out;
}

bool Accumulation::accumulates() const {
    if (radii.empty()) return false;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (cells[k] == 0) return false;
        if (k > 0 && min_period[k] <= min_period[k - 1]) return false;
    }
    return true;
}

Accumulation tongue_accumulation(const std::vector<TongueCell>& cells, PlanarPoint target,
                                 const std::vector<double>& radii) {
    Accumulation acc;
    acc.radii = radii;
    acc.cells.assign(radii.size(), 0);
    acc.min_period.assign(radii.size(), 0);
    for (const auto& c : cells) {
        if (c.period == 0) continue;
        const double d = distance({c.tau_R, c.delta_R}, target);
        for (std::size_t k = 0; k < radii.size(); ++k) {
            if (d > radii[k]) continue;
            ++acc.cells[k];
            if (acc.min_period[k] == 0 || c.period < acc.min_period[k]) acc.min_period[k] = c.period;
        }
    }
    return acc;
}

}  // namespace corner
