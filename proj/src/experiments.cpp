#include "corner/experiments.hpp"

#include <cmath>
#include <limits>

#include "corner/errors.hpp"
#include "corner/parallel.hpp"

namespace corner {

bool BcbSequence::complete() const {
    for (const auto& e : entries) {
        if (!e.ok) return false;
    }
    return true;
}

std::vector<double> BcbSequence::values() const {
    std::vector<double> out;
    for (const auto& e : entries) {
        if (e.branch == Branch::X) out.push_back(e.ok ? e.xi : std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

namespace {

Excursion excursion_at(const NormalFormParams& p) {
    const PwsMap map = make_normal_form(p);
    return extract_excursion(map, saddle_of_piece(map, kLeft));
}

}  // namespace

BcbSequence bcb_sequence(const BcbSequenceOptions& o) {
    NormalFormParams at_corner = o.base;
    at_corner.delta_R = o.corner;
    const Excursion ex = excursion_at(at_corner);
    const std::size_t reach = ex.length();
    if (o.n_min < reach + 1 || o.n_max < o.n_min) throw PreconditionError("period range too short for the excursion");

    std::vector<BcbSequenceEntry> entries;
    for (std::size_t n = o.n_min; n <= o.n_max; ++n) {
        entries.push_back({n, Branch::X, {}, false, {}, 0, 0, 0, 0});
        if (o.both_branches) entries.push_back({n, Branch::Y, {}, false, {}, 0, 0, 0, 0});
    }
    const NormalFormParams base = o.base;
    const MapFamily family = [base](double d) {
        NormalFormParams p = base;
        p.delta_R = d;
        return make_normal_form(p);
    };
    const PwsMap shown = make_normal_form(at_corner);
    parallel_for(entries.size(), o.workers, [&](std::size_t i) {
        auto& e = entries[i];
        const std::size_t k = e.n - reach;
        const Itinerary itin = single_round_itinerary(ex, e.branch, k);
        e.itinerary = format_itinerary(shown, itin);
        BcbOptions bo;
        bo.bracket = std::make_pair(o.lower, o.corner - 1e-9);
        try {
            const BcbResult r = locate_bcb(family, itin, k + ex.split, bo);
            e.ok = true;
            e.xi = r.xi;
            e.x_on_switching = r.switching_point.x;
            e.trace = r.orbit.trace;
            e.det = r.orbit.det;
        } catch (const Error& err) {
            e.error = err.what();
        }
    });

    BcbSequence seq;
    seq.entries = std::move(entries);
    const auto vals = seq.values();
    std::vector<double> ns, logs;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const std::size_t n = o.n_min + i;
        if (i + 1 < vals.size() && std::isfinite(vals[i]) && std::isfinite(vals[i + 1])) {
            seq.ratios.push_back({n, (vals[i] - o.corner) / (vals[i + 1] - o.corner)});
        }
        if (std::isfinite(vals[i])) {
            ns.push_back(static_cast<double>(n));
            logs.push_back(std::log(std::abs(vals[i] - o.corner)));
        }
    }
    seq.slope = ns.size() >= 2 ? regression_slope(ns, logs) : std::numeric_limits<double>::quiet_NaN();
    return seq;
}

std::vector<PeriodicOrbit> single_round_pair(const NormalFormParams& params, std::size_t n) {
    const PwsMap map = make_normal_form(params);
    const Excursion ex = extract_excursion(map, saddle_of_piece(map, kLeft));
    if (n < ex.length() + 1) throw PreconditionError("period too short for the excursion");
    std::vector<PeriodicOrbit> out;
    for (Branch b : {Branch::X, Branch::Y}) {
        out.push_back(solve_periodic(map, single_round_itinerary(ex, b, n - ex.length())));
    }
    return out;
}

}  // namespace corner
