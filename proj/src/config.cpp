#include "corner/config.hpp"

#include <cstdint>
#include <set>
#include <type_traits>

#include <json.hpp>

#include "corner/errors.hpp"
#include "corner/io.hpp"

namespace corner {

using Json = nlohmann::ordered_json;

PwsMap build_map(const MapSpec& spec) {
    if (spec.kind == "bcnf") return make_normal_form(spec.normal);
    if (spec.kind == "reduced") return make_reduced_normal_form(spec.reduced, spec.xi);
    if (spec.kind == "polynomial") {
        if (spec.pieces.empty()) throw ConfigError("map.pieces: at least one piece is required");
        if (spec.regions.size() != spec.pieces.size()) throw ConfigError("map.regions: one region per piece");
        for (std::size_t i = 0; i < spec.regions.size(); ++i) {
            for (const auto& c : spec.regions[i]) {
                if (c.switching >= spec.switching.size()) {
                    throw ConfigError("map.regions[" + std::to_string(i) + "]: switching index out of range");
                }
            }
        }
        return PwsMap(spec.pieces, spec.switching, spec.regions, "polynomial");
    }
    throw ConfigError("map.kind: expected bcnf, reduced or polynomial, got '" + spec.kind + "'");
}

namespace {

/// Field reader that remembers which keys were consumed, so leftovers can be
/// reported as unknown.
class Reader {
public:
    Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    template <class T>
    void get(const std::string& key, T& out) {
        used_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        convert(*it, at(key), out);
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    Reader child(const std::string& key) {
        used_.insert(key);
        return Reader(j_.at(key), at(key));
    }

    const Json& raw(const std::string& key) {
        used_.insert(key);
        return j_.at(key);
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) fail(at(it.key()), "unknown field");
        }
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& what) {
        throw ConfigError((path.empty() ? std::string("config") : path) + ": " + what);
    }

    static void convert(const Json& v, const std::string& p, double& out) {
        if (!v.is_number()) fail(p, "expected a number");
        out = v.get<double>();
    }
    static void convert(const Json& v, const std::string& p, bool& out) {
        if (!v.is_boolean()) fail(p, "expected true or false");
        out = v.get<bool>();
    }
    static void convert(const Json& v, const std::string& p, int& out) {
        if (!v.is_number_integer()) fail(p, "expected an integer");
        out = v.get<int>();
    }
    static void convert(const Json& v, const std::string& p, std::size_t& out) {
        if (!v.is_number_unsigned()) fail(p, "expected a non-negative integer");
        out = v.get<std::size_t>();
    }
    static void convert(const Json& v, const std::string& p, std::string& out) {
        if (!v.is_string()) fail(p, "expected a string");
        out = v.get<std::string>();
    }
    static void convert(const Json& v, const std::string& p, std::pair<double, double>& out) {
        if (!v.is_array() || v.size() != 2) fail(p, "expected [a, b]");
        convert(v[0], p + "[0]", out.first);
        convert(v[1], p + "[1]", out.second);
    }
    static void convert(const Json& v, const std::string& p, PlanarPoint& out) {
        if (!v.is_array() || v.size() != 2) fail(p, "expected [x, y]");
        convert(v[0], p + "[0]", out.x);
        convert(v[1], p + "[1]", out.y);
    }
    template <class T>
    static void convert(const Json& v, const std::string& p, std::optional<T>& out) {
        if (v.is_null()) {
            out.reset();
            return;
        }
        T t{};
        convert(v, p, t);
        out = t;
    }
    template <class T>
    static void convert(const Json& v, const std::string& p, std::vector<T>& out) {
        if (!v.is_array()) fail(p, "expected an array");
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            T t{};
            convert(v[i], p + "[" + std::to_string(i) + "]", t);
            out.push_back(t);
        }
    }

private:
    const Json& j_;
    std::string path_;
    std::set<std::string> used_;
};

Poly2 read_poly(const Json& v, const std::string& p) {
    if (!v.is_object()) Reader::fail(p, "expected an object of monomial coefficients");
    Poly2 out;
    for (auto it = v.begin(); it != v.end(); ++it) {
        std::size_t idx = Poly2::kTerms;
        for (std::size_t t = 0; t < Poly2::kTerms; ++t) {
            if (Poly2::kNames[t] == it.key()) idx = t;
        }
        if (idx == Poly2::kTerms) Reader::fail(p + "." + it.key(), "unknown monomial (use 1, x, y, x2, xy, y2, x3, x2y, xy2, y3)");
        Reader::convert(*it, p + "." + it.key(), out[idx]);
    }
    return out;
}

Json write_poly(const Poly2& poly) {
    Json j = Json::object();
    for (std::size_t t = 0; t < Poly2::kTerms; ++t) {
        if (poly[t] != 0.0) j[std::string(Poly2::kNames[t])] = poly[t];
    }
    return j;
}

MapSpec read_map(Reader r) {
    MapSpec m;
    r.get("kind", m.kind);
    if (m.kind == "bcnf") {
        r.get("tau_L", m.normal.tau_L);
        r.get("delta_L", m.normal.delta_L);
        r.get("tau_R", m.normal.tau_R);
        r.get("delta_R", m.normal.delta_R);
        r.get("mu", m.normal.mu);
    } else if (m.kind == "reduced") {
        m.reduced = {};
        r.get("tau_X", m.reduced.tauX);
        r.get("delta_X", m.reduced.deltaX);
        r.get("tau_Y", m.reduced.tauY);
        r.get("delta_Y", m.reduced.deltaY);
        r.get("xi", m.xi);
    } else if (m.kind == "polynomial") {
        if (r.has("pieces")) {
            const Json& ps = r.raw("pieces");
            const std::string p = r.at("pieces");
            if (!ps.is_array()) Reader::fail(p, "expected an array");
            for (std::size_t i = 0; i < ps.size(); ++i) {
                Reader pr(ps[i], p + "[" + std::to_string(i) + "]");
                Piece piece;
                pr.get("label", piece.label);
                if (pr.has("fx")) piece.fx = read_poly(pr.raw("fx"), pr.at("fx"));
                if (pr.has("fy")) piece.fy = read_poly(pr.raw("fy"), pr.at("fy"));
                pr.finish();
                m.pieces.push_back(piece);
            }
        }
        if (r.has("switching")) {
            const Json& sw = r.raw("switching");
            const std::string p = r.at("switching");
            if (!sw.is_array()) Reader::fail(p, "expected an array");
            for (std::size_t i = 0; i < sw.size(); ++i) {
                m.switching.push_back(read_poly(sw[i], p + "[" + std::to_string(i) + "]"));
            }
        }
        if (r.has("regions")) {
            const Json& rg = r.raw("regions");
            const std::string p = r.at("regions");
            if (!rg.is_array()) Reader::fail(p, "expected an array");
            for (std::size_t i = 0; i < rg.size(); ++i) {
                const std::string pi = p + "[" + std::to_string(i) + "]";
                if (!rg[i].is_array()) Reader::fail(pi, "expected an array of constraints");
                std::vector<Constraint> region;
                for (std::size_t c = 0; c < rg[i].size(); ++c) {
                    Reader cr(rg[i][c], pi + "[" + std::to_string(c) + "]");
                    Constraint con;
                    std::string side = "nonpositive";
                    cr.get("switching", con.switching);
                    cr.get("side", side);
                    if (side == "nonpositive") con.side = Side::NonPositive;
                    else if (side == "nonnegative") con.side = Side::NonNegative;
                    else Reader::fail(cr.at("side"), "expected nonpositive or nonnegative");
                    cr.finish();
                    region.push_back(con);
                }
                m.regions.push_back(region);
            }
        }
    } else {
        Reader::fail(r.at("kind"), "expected bcnf, reduced or polynomial");
    }
    r.finish();
    return m;
}

Json write_map(const MapSpec& m) {
    Json j;
    j["kind"] = m.kind;
    if (m.kind == "bcnf") {
        j["tau_L"] = m.normal.tau_L;
        j["delta_L"] = m.normal.delta_L;
        j["tau_R"] = m.normal.tau_R;
        j["delta_R"] = m.normal.delta_R;
        j["mu"] = m.normal.mu;
    } else if (m.kind == "reduced") {
        j["tau_X"] = m.reduced.tauX;
        j["delta_X"] = m.reduced.deltaX;
        j["tau_Y"] = m.reduced.tauY;
        j["delta_Y"] = m.reduced.deltaY;
        j["xi"] = m.xi;
    } else {
        j["pieces"] = Json::array();
        for (const auto& p : m.pieces) j["pieces"].push_back({{"label", p.label}, {"fx", write_poly(p.fx)}, {"fy", write_poly(p.fy)}});
        j["switching"] = Json::array();
        for (const auto& s : m.switching) j["switching"].push_back(write_poly(s));
        j["regions"] = Json::array();
        for (const auto& region : m.regions) {
            Json rj = Json::array();
            for (const auto& c : region) {
                rj.push_back({{"switching", c.switching},
                              {"side", c.side == Side::NonPositive ? "nonpositive" : "nonnegative"}});
            }
            j["regions"].push_back(rj);
        }
    }
    return j;
}

void read_grid(Reader r, GridBlock& g) {
    r.get("nx", g.nx);
    r.get("ny", g.ny);
    r.get("tau_min", g.tau_min);
    r.get("tau_max", g.tau_max);
    r.get("delta_min", g.delta_min);
    r.get("delta_max", g.delta_max);
    r.finish();
    if (g.nx == 0 || g.ny == 0) Reader::fail(r.at(""), "grid needs at least one cell");
}

Json write_grid(const GridBlock& g) {
    return {{"nx", g.nx}, {"ny", g.ny}, {"tau_min", g.tau_min}, {"tau_max", g.tau_max},
            {"delta_min", g.delta_min}, {"delta_max", g.delta_max}};
}

void read_continuation(Reader r, ContinuationBlock& c) {
    r.get("step", c.step);
    r.get("span", c.span);
    r.get("window", c.window);
    r.finish();
}

Json write_continuation(const ContinuationBlock& c) {
    return {{"step", c.step}, {"span", {c.span.first, c.span.second}}, {"window", c.window}};
}

UnfoldingParams read_unfolding(Reader r) {
    UnfoldingParams u;
    r.get("lambda", u.lambda);
    r.get("sigma", u.sigma);
    r.get("r", u.r);
    r.get("s", u.s);
    r.get("a1", u.a1);
    r.get("a2", u.a2);
    r.get("bX1", u.bX1);
    r.get("bX2", u.bX2);
    r.get("bY1", u.bY1);
    r.get("bY2", u.bY2);
    r.get("c1", u.c1);
    r.get("c2", u.c2);
    r.get("p1", u.p1);
    r.get("p3", u.p3);
    r.finish();
    return u;
}

}  // namespace

namespace {

Json unfolding_json(const UnfoldingParams& u) {
    return {{"lambda", u.lambda}, {"sigma", u.sigma}, {"r", u.r},     {"s", u.s},     {"a1", u.a1},
            {"a2", u.a2},         {"bX1", u.bX1},     {"bX2", u.bX2}, {"bY1", u.bY1}, {"bY2", u.bY2},
            {"c1", u.c1},         {"c2", u.c2},       {"p1", u.p1},   {"p3", u.p3}};
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }
    ExperimentConfig c;
    Reader r(j, "");
    r.get("version", c.version);
    if (c.version != 1) Reader::fail("version", "unsupported version " + std::to_string(c.version));
    r.get("seed", c.seed);
    r.get("workers", c.workers);
    r.get("output_dir", c.output_dir);
    if (r.has("map")) c.map = read_map(r.child("map"));
    if (r.has("iterate")) {
        Reader b = r.child("iterate");
        b.get("start", c.iterate.start);
        b.get("iterations", c.iterate.iterations);
        b.get("transient", c.iterate.transient);
        b.get("escape_radius", c.iterate.escape_radius);
        b.finish();
    }
    if (r.has("portrait")) {
        Reader b = r.child("portrait");
        auto& p = c.portrait;
        b.get("manifolds", p.manifolds);
        b.get("max_generations", p.max_generations);
        b.get("max_vertices", p.max_vertices);
        b.get("max_arclength", p.max_arclength);
        b.get("single_round_period", p.single_round_period);
        b.get("saddle_piece", p.saddle_piece);
        b.get("certificate", p.certificate);
        if (b.has("window")) {
            Reader w = b.child("window");
            w.get("xmin", p.window.xmin);
            w.get("xmax", p.window.xmax);
            w.get("ymin", p.window.ymin);
            w.get("ymax", p.window.ymax);
            w.finish();
        }
        b.finish();
    }
    if (r.has("bifdiag")) {
        Reader b = r.child("bifdiag");
        auto& p = c.bifdiag;
        b.get("corner", p.corner);
        b.get("corner_bracket", p.corner_bracket);
        b.get("lower", p.lower);
        b.get("n_min", p.n_min);
        b.get("n_max", p.n_max);
        b.finish();
    }
    if (r.has("corner")) {
        Reader b = r.child("corner");
        b.get("bracket", c.corner.bracket);
        b.get("trace", c.corner.trace);
        if (b.has("continuation")) read_continuation(b.child("continuation"), c.corner.continuation);
        b.finish();
    }
    if (r.has("sweep")) {
        Reader b = r.child("sweep");
        auto& p = c.sweep;
        if (b.has("grid")) read_grid(b.child("grid"), p.grid);
        b.get("period_cap", p.period_cap);
        b.get("sturmian_only", p.sturmian_only);
        b.get("corner_seeds", p.corner_seeds);
        if (b.has("continuation")) read_continuation(b.child("continuation"), p.continuation);
        b.finish();
    }
    if (r.has("tongues")) {
        Reader b = r.child("tongues");
        auto& p = c.tongues;
        if (b.has("grid")) read_grid(b.child("grid"), p.grid);
        b.get("period_cap", p.period_cap);
        b.get("sturmian_only", p.sturmian_only);
        b.get("samples", p.samples);
        b.get("transient", p.transient);
        b.get("kick", p.kick);
        b.get("tol", p.tol);
        b.get("target", p.target);
        b.get("radii", p.radii);
        b.finish();
        if (p.period_cap < 2) Reader::fail("tongues.period_cap", "must be at least 2");
    }
    if (r.has("validate")) {
        Reader b = r.child("validate");
        auto& p = c.validate;
        b.get("draws", p.draws);
        b.get("k_min", p.k_min);
        b.get("k_max", p.k_max);
        b.get("k_check", p.k_check);
        b.get("oracle_tol", p.oracle_tol);
        b.get("fit_tol", p.fit_tol);
        b.get("eigen_tol", p.eigen_tol);
        if (b.has("params")) {
            const Json& arr = b.raw("params");
            if (!arr.is_array()) Reader::fail(b.at("params"), "expected an array");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                p.params.push_back(read_unfolding(Reader(arr[i], b.at("params") + "[" + std::to_string(i) + "]")));
            }
        }
        b.finish();
        if (p.k_min > p.k_max) Reader::fail("validate.k_min", "must not exceed k_max");
    }
    if (r.has("tent")) {
        Reader b = r.child("tent");
        auto& p = c.tent;
        b.get("slope_left", p.params.slope_left);
        b.get("slope_right", p.params.slope_right);
        b.get("offset", p.params.offset);
        b.get("x0", p.x0);
        b.get("iterations", p.iterations);
        b.finish();
    }
    r.finish();
    return c;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string serialise_config(const ExperimentConfig& c) {
    Json j;
    j["version"] = c.version;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["output_dir"] = c.output_dir;
    j["map"] = write_map(c.map);
    j["iterate"] = {{"start", {c.iterate.start.x, c.iterate.start.y}},
                    {"iterations", c.iterate.iterations},
                    {"transient", c.iterate.transient},
                    {"escape_radius", c.iterate.escape_radius}};
    const auto& pt = c.portrait;
    j["portrait"] = {{"manifolds", pt.manifolds},
                     {"max_generations", pt.max_generations},
                     {"max_vertices", pt.max_vertices},
                     {"max_arclength", pt.max_arclength},
                     {"single_round_period", pt.single_round_period},
                     {"saddle_piece", pt.saddle_piece ? Json(*pt.saddle_piece) : Json(nullptr)},
                     {"certificate", pt.certificate},
                     {"window", {{"xmin", pt.window.xmin}, {"xmax", pt.window.xmax}, {"ymin", pt.window.ymin},
                                 {"ymax", pt.window.ymax}}}};
    const auto& bd = c.bifdiag;
    j["bifdiag"] = {{"corner", bd.corner ? Json(*bd.corner) : Json(nullptr)},
                    {"corner_bracket", {bd.corner_bracket.first, bd.corner_bracket.second}},
                    {"lower", bd.lower},
                    {"n_min", bd.n_min},
                    {"n_max", bd.n_max}};
    j["corner"] = {{"bracket", {c.corner.bracket.first, c.corner.bracket.second}},
                   {"trace", c.corner.trace},
                   {"continuation", write_continuation(c.corner.continuation)}};
    Json seeds = Json::array();
    for (const auto& s : c.sweep.corner_seeds) seeds.push_back({s.first, s.second});
    j["sweep"] = {{"grid", write_grid(c.sweep.grid)},
                  {"period_cap", c.sweep.period_cap},
                  {"sturmian_only", c.sweep.sturmian_only},
                  {"corner_seeds", seeds},
                  {"continuation", write_continuation(c.sweep.continuation)}};
    const auto& tg = c.tongues;
    j["tongues"] = {{"grid", write_grid(tg.grid)},   {"period_cap", tg.period_cap},
                    {"sturmian_only", tg.sturmian_only}, {"samples", tg.samples},
                    {"transient", tg.transient},     {"kick", tg.kick},
                    {"tol", tg.tol},                 {"target", {tg.target.x, tg.target.y}},
                    {"radii", tg.radii}};
    const auto& v = c.validate;
    Json params = Json::array();
    for (const auto& u : v.params) params.push_back(unfolding_json(u));
    j["validate"] = {{"draws", v.draws},           {"k_min", v.k_min},     {"k_max", v.k_max},
                     {"k_check", v.k_check},       {"oracle_tol", v.oracle_tol}, {"fit_tol", v.fit_tol},
                     {"eigen_tol", v.eigen_tol},   {"params", params}};
    j["tent"] = {{"slope_left", c.tent.params.slope_left},
                 {"slope_right", c.tent.params.slope_right},
                 {"offset", c.tent.params.offset},
                 {"x0", c.tent.x0},
                 {"iterations", c.tent.iterations}};
    return j.dump(2) + "\n";
}

}  // namespace corner
