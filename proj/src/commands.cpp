#include "corner/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "corner/errors.hpp"
#include "corner/experiments.hpp"
#include "corner/homoclinic.hpp"
#include "corner/manifolds.hpp"
#include "corner/modelock.hpp"
#include "corner/parallel.hpp"
#include "corner/periodic.hpp"
#include "corner/unfolding.hpp"

namespace corner {

using Json = nlohmann::ordered_json;

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"iterate", "portrait", "bifdiag", "sweep",
                                                "corner",  "validate", "tongues", "tent"};
    return names;
}

namespace {

struct Context {
    Context(const ExperimentConfig& c, std::filesystem::path d) : cfg(c), dir(std::move(d)) {}

    const ExperimentConfig& cfg;
    std::filesystem::path dir;
    std::size_t workers = 1;
    bool plot = false;
    RunManifest manifest;
    Json summary = Json::object();
    int exit_code = kExitOk;

    void emit(const std::string& name, const std::string& content) { write_artifact(dir, name, content, manifest); }
    void task(const std::string& name, const std::string& status, const std::string& detail = {}) {
        manifest.tasks.push_back({name, status, detail});
    }
    /// Worst exit code wins, except that partial beats numeric once anything succeeded.
    void degrade(int code) {
        if (code == kExitOk) return;
        if (exit_code == kExitOk || (exit_code == kExitNumeric && code == kExitPartial)) exit_code = code;
    }
};

Json point_json(PlanarPoint p) { return Json::array({p.x, p.y}); }

const NormalFormParams& require_normal_form(const ExperimentConfig& cfg, std::string_view command) {
    if (cfg.map.kind != "bcnf") {
        throw ConfigError("map.kind: '" + std::string(command) + "' needs the bcnf map");
    }
    return cfg.map.normal;
}

MapFamily delta_family(NormalFormParams base) {
    return [base](double d) {
        NormalFormParams p = base;
        p.delta_R = d;
        return make_normal_form(p);
    };
}

MapFamily2 tau_delta_family(NormalFormParams base) {
    return [base](double t, double d) {
        NormalFormParams p = base;
        p.tau_R = t;
        p.delta_R = d;
        return make_normal_form(p);
    };
}

std::string label_of(const PwsMap& map, std::size_t label) { return map.piece(label).label; }

// ---- iterate / portrait -------------------------------------------------

struct OrbitOutput {
    std::vector<PlanarPoint> kept;
    bool escaped = false;
};

OrbitOutput write_orbit(Context& ctx, const PwsMap& map) {
    const auto& it = ctx.cfg.iterate;
    OrbitOutput out;
    CsvWriter csv({"i", "x", "y", "label"});
    if (it.iterations > 0) {
        const OrbitSegment seg = iterate(map, it.start, it.transient + it.iterations, it.escape_radius);
        out.escaped = seg.escaped;
        for (std::size_t i = it.transient; i < seg.points.size(); ++i) {
            const PlanarPoint p = seg.points[i];
            const std::string label =
                i < seg.realized.size() ? label_of(map, seg.realized[i]) : label_of(map, map.region_of(p));
            csv.row(i, p.x, p.y, label);
            out.kept.push_back(p);
        }
        ctx.summary["orbit"] = {{"points", out.kept.size()},
                                {"escaped", seg.escaped},
                                {"escape_index", seg.escaped ? Json(seg.escape_index) : Json(nullptr)}};
    } else {
        ctx.summary["orbit"] = {{"points", 0}, {"escaped", false}, {"escape_index", nullptr}};
    }
    ctx.emit("orbit.csv", csv.str());
    if (out.escaped) {
        ctx.task("orbit", "escaped", "left radius " + format_real(it.escape_radius));
        ctx.degrade(kExitPartial);
    } else {
        ctx.task("orbit", "ok");
    }
    return out;
}

int cmd_iterate(Context& ctx) {
    const PwsMap map = build_map(ctx.cfg.map);
    const OrbitOutput orbit = write_orbit(ctx, map);
    if (ctx.plot) {
        const auto& w = ctx.cfg.portrait.window;
        SvgCanvas svg(w.xmin, w.xmax, w.ymin, w.ymax);
        svg.dots(orbit.kept, "#555555", 0.5);
        ctx.emit("orbit.svg", svg.str());
    }
    return ctx.exit_code;
}

void manifold_csv(CsvWriter& csv, const ManifoldPolyline& m, std::size_t piece, std::size_t& idx) {
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        csv.row(idx++, m.vertices[i].x, m.vertices[i].y, static_cast<bool>(m.kink[i]), m.generation[i], piece);
    }
}

std::optional<SaddleData> pick_saddle(const PwsMap& map, std::optional<std::size_t> piece) {
    if (piece) {
        if (*piece >= map.size()) throw ConfigError("portrait.saddle_piece: no such piece");
        return saddle_of_piece(map, *piece);
    }
    if (!map.is_piecewise_affine()) return std::nullopt;
    for (std::size_t j = 0; j < map.size(); ++j) {
        const FixedPointInfo info = affine_piece_fixed_point(map, j);
        if (info.admissible && info.saddle) return info.saddle;
    }
    return std::nullopt;
}

int cmd_portrait(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto& pc = cfg.portrait;
    const PwsMap map = build_map(cfg.map);
    const OrbitOutput orbit = write_orbit(ctx, map);

    const auto& w = pc.window;
    SvgCanvas svg(w.xmin, w.xmax, w.ymin, w.ymax);
    svg.dots(orbit.kept, "#777777", 0.5);

    std::optional<SaddleData> saddle;
    try {
        saddle = pick_saddle(map, pc.saddle_piece);
    } catch (const PreconditionError& e) {
        ctx.task("saddle", "failed", e.what());
        ctx.degrade(kExitPartial);
    }
    if (saddle) {
        ctx.summary["saddle"] = {{"piece", label_of(map, saddle->piece)},
                                 {"point", point_json(saddle->point)},
                                 {"lambda", saddle->lambda},
                                 {"sigma", saddle->sigma}};
    } else {
        ctx.summary["saddle"] = nullptr;
    }

    if (pc.manifolds && saddle) {
        GrowthBudget budget;
        budget.max_generations = pc.max_generations;
        budget.max_vertices = pc.max_vertices;
        budget.max_arclength = pc.max_arclength;
        const ManifoldSet set = grow_manifolds(map, *saddle, budget, ctx.workers);
        struct Branch {
            const char* name;
            std::vector<const ManifoldPolyline*> parts;
            bool truncated;
        };
        std::vector<Branch> branches{{"unstable_plus", {&set.unstable_plus}, set.unstable_plus.truncated},
                                     {"unstable_minus", {&set.unstable_minus}, set.unstable_minus.truncated},
                                     {"stable_plus", {}, set.stable_plus.truncated},
                                     {"stable_minus", {}, set.stable_minus.truncated}};
        for (const auto& p : set.stable_plus.pieces) branches[2].parts.push_back(&p);
        for (const auto& p : set.stable_minus.pieces) branches[3].parts.push_back(&p);
        Json mj = Json::object();
        for (const auto& b : branches) {
            CsvWriter csv({"idx", "x", "y", "is_kink", "generation", "piece"});
            std::size_t idx = 0, kinks = 0;
            for (std::size_t k = 0; k < b.parts.size(); ++k) {
                manifold_csv(csv, *b.parts[k], k, idx);
                kinks += b.parts[k]->kink_count();
                svg.polyline(b.parts[k]->vertices, b.name[0] == 'u' ? "#c0392b" : "#2471a3", 1.0);
            }
            ctx.emit(std::string("manifold_") + b.name + ".csv", csv.str());
            mj[b.name] = {{"vertices", idx}, {"pieces", b.parts.size()}, {"kinks", kinks}, {"truncated", b.truncated}};
        }
        // Separation outside a small disc around the saddle, where both manifolds start.
        const double radius = 0.5;
        std::vector<std::vector<PlanarPoint>> us, ss;
        for (const auto* p : branches[0].parts) us.push_back(beyond_radius(p->vertices, saddle->point, radius));
        for (const auto* p : branches[1].parts) us.push_back(beyond_radius(p->vertices, saddle->point, radius));
        for (std::size_t b = 2; b < 4; ++b) {
            for (const auto* p : branches[b].parts) ss.push_back(beyond_radius(p->vertices, saddle->point, radius));
        }
        double sep = std::numeric_limits<double>::infinity();
        std::size_t crossings = 0;
        for (const auto& u : us) {
            for (const auto& s : ss) {
                if (u.size() < 2 || s.size() < 2) continue;
                sep = std::min(sep, polyline_min_distance(u, s).distance);
                crossings += transverse_intersections(u, s).size();
            }
        }
        mj["separation_beyond"] = radius;
        mj["separation"] = std::isfinite(sep) ? Json(sep) : Json(nullptr);
        mj["transverse_crossings"] = crossings;
        ctx.summary["manifolds"] = mj;
        ctx.task("manifolds", "ok");
    }

    if (pc.single_round_period > 0) {
        if (cfg.map.kind != "bcnf") throw ConfigError("portrait.single_round_period: needs the bcnf map");
        CsvWriter csv({"branch", "i", "x", "y", "label"});
        Json orbits = Json::array();
        try {
            const auto pair = single_round_pair(cfg.map.normal, pc.single_round_period);
            const char* names[] = {"X", "Y"};
            for (std::size_t b = 0; b < pair.size(); ++b) {
                const auto& o = pair[b];
                for (std::size_t i = 0; i < o.points.size(); ++i) {
                    csv.row(names[b], i, o.points[i].x, o.points[i].y, label_of(map, o.itinerary[i]));
                }
                svg.dots(o.points, "black", 2.5);
                orbits.push_back({{"branch", names[b]},
                                  {"itinerary", format_itinerary(map, o.itinerary)},
                                  {"admissible", o.admissible()},
                                  {"margin", o.margin},
                                  {"trace", o.trace},
                                  {"det", o.det},
                                  {"stability", to_string(o.stability)}});
            }
            ctx.task("single_round", "ok");
        } catch (const Error& e) {
            ctx.task("single_round", "failed", e.what());
            ctx.degrade(kExitPartial);
        }
        ctx.emit("periodic_orbits.csv", csv.str());
        ctx.summary["single_round"] = orbits;
    }

    if (pc.certificate) {
        if (cfg.map.kind != "reduced") throw ConfigError("portrait.certificate: needs the reduced map");
        try {
            const auto c = transversality_certificate(cfg.map.reduced, cfg.map.xi);
            ctx.summary["certificate"] = {{"piece", label_of(map, c.piece)},
                                          {"fixed_point", point_json(c.fixed_point)},
                                          {"other_fixed_point", point_json(c.other_fixed_point)},
                                          {"eig_stable", c.eig_stable},
                                          {"eig_unstable", c.eig_unstable},
                                          {"z_minus1", point_json(c.z_minus1)},
                                          {"crossing_point", point_json(c.crossing_point)},
                                          {"z_1", point_json(c.z_1)},
                                          {"z_2", point_json(c.z_2)},
                                          {"transverse", c.crossing},
                                          {"angle", c.angle},
                                          {"intersection", point_json(c.intersection)}};
            svg.polyline({c.fixed_point, c.z_minus1}, "#2471a3", 2.0);
            svg.polyline({c.z_1, c.z_2}, "#c0392b", 2.0);
            svg.dots({c.z_minus1, c.z_1, c.z_2}, "black", 3.0);
            ctx.task("certificate", c.crossing ? "ok" : "failed", c.crossing ? "" : "no crossing");
            if (!c.crossing) ctx.degrade(kExitPartial);
        } catch (const Error& e) {
            ctx.task("certificate", "failed", e.what());
            ctx.degrade(kExitNumeric);
        }
    }
    if (ctx.plot) ctx.emit("portrait.svg", svg.str());
    return ctx.exit_code;
}

// ---- bifdiag / corner ---------------------------------------------------

int cmd_bifdiag(Context& ctx) {
    const auto& bd = ctx.cfg.bifdiag;
    const NormalFormParams base = require_normal_form(ctx.cfg, "bifdiag");
    double corner = 0.0;
    if (bd.corner) {
        corner = *bd.corner;
        ctx.summary["corner"] = {{"delta_R", corner}, {"located", false}};
    } else {
        try {
            const auto loc = locate_corner(delta_family(base), bd.corner_bracket);
            corner = loc.parameter;
            ctx.summary["corner"] = {{"delta_R", corner}, {"located", true}};
            ctx.task("corner", "ok");
        } catch (const Error& e) {
            ctx.task("corner", "failed", e.what());
            return kExitNumeric;
        }
    }
    BcbSequenceOptions o;
    o.base = base;
    o.corner = corner;
    o.lower = bd.lower;
    o.n_min = bd.n_min;
    o.n_max = bd.n_max;
    o.workers = ctx.workers;
    BcbSequence seq;
    try {
        seq = bcb_sequence(o);
    } catch (const Error& e) {
        ctx.task("bcb", "failed", e.what());
        return kExitNumeric;
    }
    CsvWriter csv({"n", "xi_bcb", "branch", "x_on_switching", "trace", "det"});
    std::size_t located = 0;
    for (const auto& e : seq.entries) {
        const std::string name = "bcb_n" + std::to_string(e.n) + "_" + to_char(e.branch);
        if (!e.ok) {
            ctx.task(name, "failed", e.error);
            continue;
        }
        ++located;
        csv.row(e.n, e.xi, std::string(1, to_char(e.branch)), e.x_on_switching, e.trace, e.det);
    }
    ctx.emit("bifurcations.csv", csv.str());
    CsvWriter ratios({"n", "ratio"});
    for (const auto& r : seq.ratios) ratios.row(r.n, r.ratio);
    ctx.emit("ratios.csv", ratios.str());
    const double sigma = saddle_of_piece(make_normal_form(base), kLeft).sigma;
    ctx.summary["sigma"] = sigma;
    ctx.summary["slope"] = seq.slope;
    ctx.summary["slope_relative_error"] = std::abs(seq.slope + std::log(sigma)) / std::log(sigma);
    ctx.summary["ratios"] = Json::array();
    for (const auto& r : seq.ratios) ctx.summary["ratios"].push_back({{"n", r.n}, {"ratio", r.ratio}});
    if (ctx.plot) {
        double lo = std::numeric_limits<double>::infinity(), hi = corner;
        std::vector<PlanarPoint> pts;
        for (const auto& e : seq.entries) {
            if (!e.ok) continue;
            pts.push_back({e.xi, static_cast<double>(e.n) + e.x_on_switching});
            lo = std::min(lo, e.xi);
        }
        if (!pts.empty()) {
            const double pad = 0.05 * (hi - lo + 1e-9);
            SvgCanvas svg(lo - pad, hi + pad, static_cast<double>(bd.n_min) - 1.0, static_cast<double>(bd.n_max) + 2.0);
            svg.dots(pts, "black", 2.0);
            svg.polyline({{corner, static_cast<double>(bd.n_min) - 1.0}, {corner, static_cast<double>(bd.n_max) + 2.0}},
                         "#c0392b", 1.0);
            ctx.emit("bifurcations.svg", svg.str());
        }
    }
    if (located == 0) return kExitNumeric;
    if (located < seq.entries.size()) ctx.degrade(kExitPartial);
    return ctx.exit_code;
}

ContinuationOptions continuation_options(const ContinuationBlock& b) {
    ContinuationOptions o;
    o.step = b.step;
    o.span = b.span;
    o.window = b.window;
    return o;
}

void locus_csv(Context& ctx, const std::string& name, const CornerLocus& locus) {
    CsvWriter csv({"tau_R", "delta_R", "residual"});
    for (const auto& s : locus.samples) csv.row(s.a, s.b, s.residual);
    ctx.emit(name, csv.str());
}

int cmd_corner(Context& ctx) {
    const auto& cb = ctx.cfg.corner;
    const NormalFormParams base = require_normal_form(ctx.cfg, "corner");
    CornerLocation loc;
    try {
        loc = locate_corner(delta_family(base), cb.bracket);
    } catch (const Error& e) {
        ctx.task("corner", "failed", e.what());
        ctx.summary["corner"] = nullptr;
        ctx.summary["error"] = e.what();
        return kExitNumeric;
    }
    ctx.task("corner", "ok");
    ctx.summary["corner"] = {{"tau_R", base.tau_R},
                             {"delta_R", loc.parameter},
                             {"distance", loc.distance.value},
                             {"kink", point_json(loc.distance.kink)},
                             {"entry", point_json(loc.distance.entry)},
                             {"evaluations", loc.evaluations}};
    if (cb.trace) {
        const auto locus = trace_corner_curve(tau_delta_family(base), {base.tau_R, loc.parameter},
                                              continuation_options(cb.continuation));
        locus_csv(ctx, "locus.csv", locus);
        ctx.summary["locus"] = {{"samples", locus.samples.size()},
                                {"stalled", locus.stalled},
                                {"stall_at", locus.stall_at ? Json(*locus.stall_at) : Json(nullptr)}};
        if (locus.stalled) {
            ctx.task("locus", "failed", "continuation stalled");
            ctx.degrade(kExitPartial);
        } else {
            ctx.task("locus", "ok");
        }
    }
    return ctx.exit_code;
}

// ---- tongues / sweep ----------------------------------------------------

TongueScanOptions scan_options(const NormalFormParams& base, const GridBlock& g, std::size_t cap, bool sturmian,
                               std::size_t workers) {
    TongueScanOptions o;
    o.grid = {g.nx, g.ny, g.tau_min, g.tau_max, g.delta_min, g.delta_max};
    o.tau_L = base.tau_L;
    o.delta_L = base.delta_L;
    o.mu = base.mu;
    o.period_cap = cap;
    o.sturmian_only = sturmian;
    o.workers = workers;
    return o;
}

void tongue_raster(SvgCanvas& svg, const TongueScanOptions& o, const std::vector<TongueCell>& cells) {
    const auto& g = o.grid;
    const double dx = g.nx > 1 ? (g.tau_max - g.tau_min) / static_cast<double>(g.nx - 1) : 1.0;
    const double dy = g.ny > 1 ? (g.delta_max - g.delta_min) / static_cast<double>(g.ny - 1) : 1.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
        std::size_t i = 0;
        while (i < g.nx) {
            const std::size_t p = cells[j * g.nx + i].period;
            std::size_t e = i + 1;
            while (e < g.nx && cells[j * g.nx + e].period == p) ++e;
            if (p > 0) {
                svg.rect(g.tau(i) - 0.5 * dx, g.delta(j) - 0.5 * dy, g.tau(e - 1) + 0.5 * dx, g.delta(j) + 0.5 * dy,
                         period_colour(p, o.period_cap));
            }
            i = e;
        }
    }
}

void tongue_legend(SvgCanvas& svg, std::size_t cap, int width) {
    const double x = width - 40.0;
    for (std::size_t p = 1; p <= cap; ++p) {
        const double y = 20.0 + 16.0 * static_cast<double>(p - 1);
        svg.pixel_rect(x, y, 12, 12, period_colour(p, cap));
        svg.label(x + 15, y + 10, std::to_string(p), "black", 9);
    }
}

std::string tongue_csv(const std::vector<TongueCell>& cells) {
    CsvWriter csv({"i", "j", "tau_R", "delta_R", "period"});
    for (const auto& c : cells) csv.row(c.i, c.j, c.tau_R, c.delta_R, c.period);
    return csv.str();
}

bool cancelled(Context& ctx, const std::string& task) {
    if (!cancel_flag().load()) return false;
    ctx.task(task, "cancelled", "interrupted; unclaimed cells left empty");
    ctx.degrade(kExitPartial);
    return true;
}

int cmd_tongues(Context& ctx) {
    const auto& tb = ctx.cfg.tongues;
    const NormalFormParams base = require_normal_form(ctx.cfg, "tongues");
    const TongueScanOptions o = scan_options(base, tb.grid, tb.period_cap, tb.sturmian_only, ctx.workers);
    const auto cells = scan_tongues(o);
    const bool stopped = cancelled(ctx, "scan");
    if (!stopped) ctx.task("scan", "ok");
    ctx.emit("tongues.csv", tongue_csv(cells));
    std::size_t occupied = 0;
    std::vector<std::size_t> per_period(tb.period_cap + 1, 0);
    for (const auto& c : cells) {
        if (c.period == 0) continue;
        ++occupied;
        ++per_period[c.period];
    }
    Json hist = Json::object();
    for (std::size_t p = 1; p <= tb.period_cap; ++p) {
        if (per_period[p]) hist[std::to_string(p)] = per_period[p];
    }
    ctx.summary["cells"] = cells.size();
    ctx.summary["tongue_cells"] = occupied;
    ctx.summary["cells_per_period"] = hist;
    const Accumulation acc = tongue_accumulation(cells, tb.target, tb.radii);
    Json discs = Json::array();
    for (std::size_t k = 0; k < acc.radii.size(); ++k) {
        discs.push_back({{"radius", acc.radii[k]}, {"cells", acc.cells[k]}, {"min_period", acc.min_period[k]}});
    }
    ctx.summary["accumulation"] = {{"target", point_json(tb.target)}, {"discs", discs}, {"accumulates", acc.accumulates()}};
    if (!stopped) {
        const ConvergenceCheck cc = check_convergence(o, cells, tb.samples, ctx.cfg.seed, tb.transient, tb.kick, tb.tol);
        ctx.summary["convergence"] = {{"sampled", cc.sampled},
                                      {"converged", cc.converged},
                                      {"fraction", cc.fraction()},
                                      {"transient", tb.transient},
                                      {"kick", tb.kick},
                                      {"tol", tb.tol},
                                      {"seed", ctx.cfg.seed}};
    }
    if (ctx.plot) {
        SvgCanvas svg(tb.grid.tau_min, tb.grid.tau_max, tb.grid.delta_min, tb.grid.delta_max, 840, 600);
        tongue_raster(svg, o, cells);
        tongue_legend(svg, tb.period_cap, 840);
        ctx.emit("tongues.svg", svg.str());
    }
    return ctx.exit_code;
}

int cmd_sweep(Context& ctx) {
    const auto& sb = ctx.cfg.sweep;
    const NormalFormParams base = require_normal_form(ctx.cfg, "sweep");
    const TongueScanOptions o = scan_options(base, sb.grid, sb.period_cap, sb.sturmian_only, ctx.workers);
    const auto cells = scan_tongues(o);
    if (!cancelled(ctx, "scan")) ctx.task("scan", "ok");
    ctx.emit("tongues.csv", tongue_csv(cells));

    std::vector<CornerLocus> loci(sb.corner_seeds.size());
    std::vector<std::string> errors(sb.corner_seeds.size());
    const auto family = tau_delta_family(base);
    const auto copts = continuation_options(sb.continuation);
    parallel_for(loci.size(), ctx.workers, [&](std::size_t k) {
        try {
            loci[k] = trace_corner_curve(family, sb.corner_seeds[k], copts);
        } catch (const Error& e) {
            errors[k] = e.what();
        }
    });
    Json curves = Json::array();
    for (std::size_t k = 0; k < loci.size(); ++k) {
        const std::string name = "locus_" + std::to_string(k);
        locus_csv(ctx, name + ".csv", loci[k]);
        const bool bad = !errors[k].empty() || loci[k].stalled || loci[k].samples.empty();
        ctx.task(name, bad ? "failed" : "ok", errors[k].empty() ? (bad ? "continuation stalled" : "") : errors[k]);
        if (bad) ctx.degrade(kExitPartial);
        curves.push_back({{"seed", {sb.corner_seeds[k].first, sb.corner_seeds[k].second}},
                          {"samples", loci[k].samples.size()},
                          {"stalled", loci[k].stalled}});
    }
    std::size_t occupied = 0;
    for (const auto& c : cells) occupied += c.period > 0;
    ctx.summary["cells"] = cells.size();
    ctx.summary["tongue_cells"] = occupied;
    ctx.summary["corner_curves"] = curves;
    if (ctx.plot) {
        SvgCanvas svg(sb.grid.tau_min, sb.grid.tau_max, sb.grid.delta_min, sb.grid.delta_max, 840, 600);
        tongue_raster(svg, o, cells);
        for (const auto& l : loci) {
            std::vector<PlanarPoint> pts;
            for (const auto& s : l.samples) pts.push_back({s.a, s.b});
            svg.polyline(pts, "black", 1.5);
        }
        svg.dots({{-0.6, 1.25}, {-0.6, 1.35}, {-0.6, 1.45}}, "black", 3.0);
        tongue_legend(svg, sb.period_cap, 840);
        ctx.emit("sweep.svg", svg.str());
    }
    return ctx.exit_code;
}

// ---- validate / tent ----------------------------------------------------

Json quadrant_json(const SignQuadrant& q) {
    return {{"sign_c2", q.sign_c2}, {"sign_bX2", q.sign_bX2}, {"bcb_side", q.bcb_side}, {"existence_side", q.existence_side}};
}

Json draw_json(const DrawResult& d) {
    return {{"seed", d.seed},
            {"ok", d.ok},
            {"oracle_error", d.oracle_error},
            {"fit", {{"C1", d.fit.C1}, {"C2", d.fit.C2}, {"C", d.fit.C}, {"residual", d.fit.residual}}},
            {"eigen_u_error", d.eigen_u_error},
            {"eigen_s_error", d.eigen_s_error},
            {"lambda", d.params.lambda},
            {"sigma", d.params.sigma}};
}

int cmd_validate(Context& ctx) {
    const auto& vb = ctx.cfg.validate;
    ValidationOptions o;
    o.seed = ctx.cfg.seed;
    o.draws = vb.draws;
    o.k_min = vb.k_min;
    o.k_max = vb.k_max;
    o.k_check = vb.k_check;
    o.oracle_tol = vb.oracle_tol;
    o.fit_tol = vb.fit_tol;
    o.eigen_tol = vb.eigen_tol;
    o.workers = ctx.workers;
    Json draws = Json::array();
    if (!vb.params.empty()) {
        std::size_t passed = 0, rejected = 0;
        for (std::size_t i = 0; i < vb.params.size(); ++i) {
            const std::string name = "params_" + std::to_string(i);
            const GenericityReport g = validate_genericity(vb.params[i]);
            if (!g.ok()) {
                ++rejected;
                ctx.task(name, "failed", "rejected: " + g.failures());
                draws.push_back({{"index", i}, {"rejected", g.failures()}});
                continue;
            }
            const DrawResult d = validate_draw(vb.params[i], split_seed(o.seed, i), o);
            passed += d.ok;
            if (d.ok) {
                ctx.task(name, "ok");
            } else {
                ctx.task(name, "failed", "outside tolerance");
                ctx.degrade(kExitPartial);
            }
            Json dj = draw_json(d);
            dj["index"] = i;
            draws.push_back(dj);
        }
        ctx.summary["passed"] = passed;
        ctx.summary["rejected"] = rejected;
        if (rejected == vb.params.size()) return kExitNumeric;
        if (rejected) ctx.degrade(kExitPartial);
    } else {
        const ValidationReport r = run_validation_suite(o);
        for (const auto& d : r.draws) draws.push_back(draw_json(d));
        ctx.summary["passed"] = r.passed;
        ctx.summary["worst_oracle_error"] = r.worst_oracle_error;
        ctx.summary["worst_fit_residual"] = r.worst_fit_residual;
        ctx.summary["worst_eigen_error"] = r.worst_eigen_error;
        if (r.passed == r.draws.size()) {
            ctx.task("suite", "ok");
        } else {
            ctx.task("suite", "failed",
                     std::to_string(r.passed) + "/" + std::to_string(r.draws.size()) + " draws within tolerance");
            ctx.degrade(kExitPartial);
        }
    }
    const auto predicted = quadrant_table();
    const auto observed = observe_quadrants();
    Json quadrants = Json::array();
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        quadrants.push_back({{"predicted", quadrant_json(predicted[i])}, {"observed", quadrant_json(observed[i])}});
    }
    ctx.summary["quadrants_match"] = predicted == observed;
    ctx.summary["quadrants"] = quadrants;
    ctx.summary["seed"] = o.seed;
    ctx.summary["draws"] = draws;
    ctx.summary["all_passed"] = [&] {
        for (const auto& d : draws) {
            if (!d.contains("ok") || !d["ok"].get<bool>()) return false;
        }
        return ctx.summary.value("quadrants_match", true);
    }();
    Json report = {{"seed", o.seed}, {"draws", draws}, {"quadrants", quadrants}};
    ctx.emit("validation.json", report.dump(2) + "\n");
    return ctx.exit_code;
}

int cmd_tent(Context& ctx) {
    const auto& tb = ctx.cfg.tent;
    const auto xs = skew_tent_iterate(tb.params, tb.x0, tb.iterations);
    CsvWriter csv({"i", "x"});
    for (std::size_t i = 0; i < xs.size(); ++i) csv.row(i, xs[i]);
    ctx.emit("tent.csv", csv.str());
    Json fps = Json::array();
    for (const auto& f : skew_tent_fixed_points(tb.params)) {
        fps.push_back({{"x", f.x}, {"branch", f.left ? "left" : "right"}, {"admissible", f.admissible}, {"unstable", f.unstable}});
    }
    ctx.summary["fixed_points"] = fps;
    ctx.summary["final"] = xs.back();
    ctx.task("tent", "ok");
    if (ctx.plot) {
        double lo = *std::min_element(xs.begin(), xs.end()), hi = *std::max_element(xs.begin(), xs.end());
        if (!(hi > lo)) hi = lo + 1.0;
        std::vector<PlanarPoint> pts;
        for (std::size_t i = 0; i < xs.size(); ++i) pts.push_back({static_cast<double>(i), xs[i]});
        SvgCanvas svg(0.0, static_cast<double>(std::max<std::size_t>(xs.size(), 2) - 1), lo, hi);
        svg.polyline(pts, "black", 1.0);
        ctx.emit("tent.svg", svg.str());
    }
    return ctx.exit_code;
}

}  // namespace

CommandResult run_command(std::string_view name, ExperimentConfig cfg, const CommandOptions& options) {
    if (std::find(command_names().begin(), command_names().end(), name) == command_names().end()) {
        throw ConfigError("unknown command '" + std::string(name) + "'");
    }
    if (options.seed) cfg.seed = *options.seed;
    const auto start = std::chrono::steady_clock::now();
    Context ctx(cfg, options.out_dir ? *options.out_dir : std::filesystem::path(cfg.output_dir));
    ctx.workers = options.workers ? options.workers : (cfg.workers ? cfg.workers : default_workers());
    ctx.plot = options.plot;
    ctx.manifest.command = std::string(name);
    ctx.manifest.config_hash = hex64(fnv1a64(serialise_config(cfg)));
    ctx.manifest.workers = ctx.workers;
    ctx.summary["command"] = std::string(name);

    std::error_code ec;
    std::filesystem::create_directories(ctx.dir, ec);
    if (ec) throw ConfigError("output_dir: cannot create " + ctx.dir.string() + ": " + ec.message());

    int code = kExitOk;
    try {
        if (name == "iterate") code = cmd_iterate(ctx);
        else if (name == "portrait") code = cmd_portrait(ctx);
        else if (name == "bifdiag") code = cmd_bifdiag(ctx);
        else if (name == "sweep") code = cmd_sweep(ctx);
        else if (name == "corner") code = cmd_corner(ctx);
        else if (name == "validate") code = cmd_validate(ctx);
        else if (name == "tongues") code = cmd_tongues(ctx);
        else code = cmd_tent(ctx);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        ctx.task(std::string(name), "failed", e.what());
        ctx.summary["error"] = e.what();
        code = kExitNumeric;
    }
    ctx.summary["exit_code"] = code;
    const std::string summary = ctx.summary.dump(2) + "\n";
    ctx.emit("summary.json", summary);
    ctx.manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    // The manifest describes the other files; it is not listed in itself.
    RunManifest scratch;
    write_artifact(ctx.dir, "manifest.json", ctx.manifest.to_json(), scratch);
    return {code, ctx.manifest, summary};
}

}  // namespace corner
