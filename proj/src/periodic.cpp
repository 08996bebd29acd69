#include "corner/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "corner/errors.hpp"
#include "corner/parallel.hpp"
#include "corner/roots.hpp"

namespace corner {

namespace {

constexpr double kUnitTol = 1e-12;

Stability classify(std::complex<double> small, std::complex<double> large) {
    const double a = std::abs(small), b = std::abs(large);
    if (std::abs(a - 1.0) <= kUnitTol || std::abs(b - 1.0) <= kUnitTol) return Stability::NonHyperbolic;
    if (b < 1.0) return Stability::Stable;
    if (a > 1.0) return Stability::Unstable;
    return Stability::Saddle;
}

}  // namespace

const char* to_string(Stability s) {
    switch (s) {
        case Stability::Saddle: return "saddle";
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::NonHyperbolic: return "nonhyperbolic";
    }
    return "?";
}

PeriodicOrbit orbit_from_point(const PwsMap& map, const Itinerary& itin, PlanarPoint p0) {
    if (itin.empty()) throw PreconditionError("empty itinerary");
    PeriodicOrbit orbit;
    orbit.itinerary = itin;
    orbit.points.reserve(itin.size());
    Mat2 jac = Mat2::identity();
    PlanarPoint p = p0;
    orbit.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < itin.size(); ++i) {
        orbit.points.push_back(p);
        const double m = map.margin(itin[i], p);
        if (m < orbit.margin) {
            orbit.margin = m;
            orbit.margin_index = i;
        }
        const Piece& piece = map.piece(itin[i]);
        jac = piece.jacobian(p) * jac;
        p = piece(p);
    }
    orbit.closure_residual = distance(p, p0);
    orbit.trace = jac.trace();
    orbit.det = jac.det();
    std::tie(orbit.eig_small, orbit.eig_large) = eigenvalues(orbit.trace, orbit.det);
    orbit.stability = classify(orbit.eig_small, orbit.eig_large);
    return orbit;
}

PeriodicOrbit solve_periodic(const PwsMap& map, const Itinerary& itin) {
    if (!map.is_piecewise_affine()) throw PreconditionError("solve_periodic needs affine pieces");
    if (itin.empty()) throw PreconditionError("empty itinerary");
    // With affine pieces f_L(p) = A p + f_L(0).
    const Composition c = compose_along(map, itin, {0.0, 0.0});
    return orbit_from_point(map, itin, affine_fixed_point(c.jacobian, c.point));
}

PeriodicOrbit solve_periodic_newton(const PwsMap& map, const Itinerary& itin, PlanarPoint guess, double tol,
                                    int max_iterations) {
    PlanarPoint p = guess;
    for (int it = 0; it < max_iterations; ++it) {
        const Composition c = compose_along(map, itin, p);
        const Vec2 residual = c.point - p;
        if (norm(residual) <= tol * std::max(1.0, norm(p))) return orbit_from_point(map, itin, p);
        const Mat2 j = c.jacobian - Mat2::identity();
        if (j.det() == 0.0) throw NoFixedPointError("singular Newton step");
        p -= j.inverse() * residual;
        if (!is_finite(p)) throw NoFixedPointError("Newton iteration diverged");
    }
    const PeriodicOrbit orbit = orbit_from_point(map, itin, p);
    if (orbit.closure_residual > 1e-9) throw NoFixedPointError("Newton iteration did not converge");
    return orbit;
}

Excursion extract_excursion(const PwsMap& map, const SaddleData& saddle, std::size_t max_steps,
                            double escape_radius) {
    const auto cr = primary_unstable_crossing(map, saddle);
    if (!cr) throw PreconditionError("unstable eigenline never reaches a switching manifold");

    Excursion ex;
    ex.saddle_piece = saddle.piece;
    ex.crossing = cr->point;
    const auto labels = map.labels_at(ex.crossing, 1e-9);
    if (labels.size() < 2) throw PreconditionError("eigenline crossing carries a single label");
    ex.letter_x = labels[0];
    ex.letter_y = labels[1];
    ex.split = 1;
    ex.word.letters = {saddle.piece, ex.letter_x};

    PlanarPoint p = map.piece(ex.letter_x)(ex.crossing);
    for (std::size_t step = 0; step < max_steps; ++step) {
        if (!is_finite(p) || norm(p) > escape_radius) throw EscapeError("corner orbit escaped before returning");
        if (map.in_region(saddle.piece, p)) return ex;
        const std::size_t label = map.region_of(p);
        ex.word.letters.push_back(label);
        p = map.piece(label)(p);
    }
    throw BudgetError("corner orbit did not return to the saddle's region");
}

Itinerary single_round_itinerary(const Excursion& ex, Branch branch, std::size_t k) {
    Itinerary word = ex.word;
    word.letters[ex.split] = branch == Branch::X ? ex.letter_x : ex.letter_y;
    return concat(repeat(ex.saddle_piece, k), word);
}

SingleRoundFamily find_single_round(const PwsMap& map, const Excursion& ex, Branch branch, std::size_t k) {
    SingleRoundFamily fam;
    fam.excursion = ex;
    fam.branch = branch;
    fam.k = k;
    fam.orbit = solve_periodic(map, single_round_itinerary(ex, branch, k));
    return fam;
}

double point_margin(const PwsMap& map, const PeriodicOrbit& orbit, std::size_t index) {
    return map.margin(orbit.itinerary[index], orbit.points.at(index));
}

BcbResult locate_bcb(const MapFamily& family, const Itinerary& itin, std::size_t switch_index,
                     const BcbOptions& options) {
    if (switch_index >= itin.size()) throw PreconditionError("switch index outside the itinerary");
    std::optional<PlanarPoint> guess = options.guess;
    auto solve = [&](double xi) {
        const PwsMap map = family(xi);
        if (map.is_piecewise_affine()) return solve_periodic(map, itin);
        PeriodicOrbit orbit = solve_periodic_newton(map, itin, guess.value_or(PlanarPoint{}));
        guess = orbit.points.front();
        return orbit;
    };
    int evaluations = 0;
    auto f = [&](double xi) {
        ++evaluations;
        const PeriodicOrbit orbit = solve(xi);
        return point_margin(family(xi), orbit, switch_index);
    };
    auto [a, b] = options.bracket ? *options.bracket
                                  : expand_bracket(f, options.seed, options.step, options.max_expansions);
    const RootResult root = find_root(f, a, b, options.xtol);
    BcbResult out;
    out.xi = root.root;
    out.orbit = solve(root.root);
    out.switching_point = out.orbit.points[switch_index];
    out.evaluations = evaluations;
    return out;
}

Itinerary multi_round_itinerary(const Excursion& ex, const MultiRoundSpec& spec) {
    if (spec.ks.size() != spec.branches.size() || spec.ks.empty()) {
        throw PreconditionError("multi-round spec needs one branch per round");
    }
    Itinerary out;
    for (std::size_t i = 0; i < spec.rounds(); ++i) {
        out = concat(out, single_round_itinerary(ex, spec.branches[i], spec.ks[i]));
    }
    return out;
}

namespace {

using Round = std::pair<std::size_t, int>;  // (k, branch)

bool canonical_primitive(const std::vector<Round>& rounds) {
    const std::size_t q = rounds.size();
    for (std::size_t s = 1; s < q; ++s) {
        // compare rotation by s against the original
        for (std::size_t i = 0; i < q; ++i) {
            const Round& a = rounds[(i + s) % q];
            const Round& b = rounds[i];
            if (a < b) return false;  // a smaller rotation exists
            if (b < a) break;
            if (i + 1 == q) return false;  // rotation equals original: not primitive
        }
    }
    return true;
}

void enumerate_rec(std::vector<Round>& cur, std::size_t used, std::size_t max_q, std::size_t max_period,
                   std::size_t r, std::vector<MultiRoundSpec>& out) {
    if (!cur.empty() && canonical_primitive(cur)) {
        MultiRoundSpec spec;
        for (const auto& [k, b] : cur) {
            spec.ks.push_back(k);
            spec.branches.push_back(b == 0 ? Branch::X : Branch::Y);
        }
        out.push_back(std::move(spec));
    }
    if (cur.size() == max_q) return;
    for (std::size_t k = 1; used + k + r <= max_period; ++k) {
        for (int b = 0; b < 2; ++b) {
            cur.emplace_back(k, b);
            enumerate_rec(cur, used + k + r, max_q, max_period, r, out);
            cur.pop_back();
        }
    }
}

}  // namespace

std::vector<MultiRoundSpec> enumerate_multi_round(std::size_t max_q, std::size_t max_period,
                                                  std::size_t excursion_length) {
    std::vector<MultiRoundSpec> out;
    std::vector<Round> cur;
    enumerate_rec(cur, 0, max_q, max_period, excursion_length, out);
    std::sort(out.begin(), out.end(), [](const MultiRoundSpec& a, const MultiRoundSpec& b) {
        if (a.rounds() != b.rounds()) return a.rounds() < b.rounds();
        if (a.ks != b.ks) return a.ks < b.ks;
        return a.branches < b.branches;
    });
    return out;
}

InstabilityReport scan_periodic_instability(const MapFamily& family, std::size_t saddle_piece, std::size_t max_q,
                                            std::size_t max_period, const ParameterWindow& window,
                                            std::size_t workers) {
    struct Sample {
        double xi;
        std::optional<PwsMap> map;
        Excursion ex;
        std::vector<MultiRoundSpec> specs;
    };
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < window.samples; ++i) {
        Sample s{window.at(i), std::nullopt, {}, {}};
        s.map.emplace(family(s.xi));
        try {
            const SaddleData saddle = saddle_of_piece(*s.map, saddle_piece);
            s.ex = extract_excursion(*s.map, saddle);
            s.specs = enumerate_multi_round(max_q, max_period, s.ex.length());
        } catch (const Error&) {
            // no saddle or no excursion at this parameter: nothing to scan
        }
        samples.push_back(std::move(s));
    }

    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = 0; j < samples[i].specs.size(); ++j) tasks.emplace_back(i, j);
    }
    std::vector<std::optional<InstabilityEntry>> results(tasks.size());
    parallel_for(tasks.size(), workers, [&](std::size_t t) {
        const Sample& s = samples[tasks[t].first];
        const MultiRoundSpec& spec = s.specs[tasks[t].second];
        const Itinerary itin = multi_round_itinerary(s.ex, spec);
        PeriodicOrbit orbit;
        try {
            orbit = solve_periodic(*s.map, itin);
        } catch (const NoFixedPointError&) {
            return;
        }
        if (!orbit.admissible()) return;
        InstabilityEntry e;
        e.itinerary = format_itinerary(*s.map, itin);
        e.period = itin.size();
        e.rounds = spec.rounds();
        e.parameter = s.xi;
        e.spectral_radius = orbit.spectral_radius();
        e.trace = orbit.trace;
        e.det = orbit.det;
        e.margin = orbit.margin;
        results[t] = e;
    });

    InstabilityReport report;
    report.candidates = tasks.size();
    std::set<std::string> distinct;
    for (auto& r : results) {
        if (!r) continue;
        if (r->spectral_radius <= 1.0) ++report.flagged;
        distinct.insert(r->itinerary);
        report.admissible.push_back(std::move(*r));
    }
    report.distinct_itineraries = distinct.size();
    std::sort(report.admissible.begin(), report.admissible.end(), [](const auto& a, const auto& b) {
        if (a.period != b.period) return a.period < b.period;
        if (a.itinerary != b.itinerary) return a.itinerary < b.itinerary;
        return a.parameter < b.parameter;
    });
    return report;
}

}  // namespace corner
