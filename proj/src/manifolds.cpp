#include "corner/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "corner/errors.hpp"
#include "corner/parallel.hpp"

namespace corner {

namespace {

struct Vertex {
    PlanarPoint p;
    bool kink = false;
    int age = -1;
    bool crossing = false;  // sits on a switching manifold between different pieces
};

using Chain = std::vector<Vertex>;

bool same_piece(const Piece& a, const Piece& b) { return a.fx == b.fx && a.fy == b.fy; }

/// Parameter in (0, 1) where h changes sign along [a, b].
double crossing_parameter(const Poly2& h, PlanarPoint a, PlanarPoint b, double ha, double hb) {
    if (h.degree() <= 1) return ha / (ha - hb);
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double hm = h(a + mid * (b - a));
        if ((hm < 0.0) == (ha < 0.0) && hm != 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

bool labels_differ(const PwsMap& map, PlanarPoint before, PlanarPoint after) {
    const std::size_t la = map.region_of(before);
    const std::size_t lb = map.region_of(after);
    return la != lb && !same_piece(map.piece(la), map.piece(lb));
}

/// Inserts a vertex at every point where a segment crosses a switching
/// manifold separating different pieces. Returns the number of such points.
std::size_t split_chain(const PwsMap& map, Chain& chain) {
    Chain out;
    out.reserve(chain.size() + 8);
    std::size_t count = 0;
    const auto& hs = map.switching();
    for (std::size_t i = 0; i < chain.size(); ++i) {
        Vertex v = chain[i];
        if (i > 0 && i + 1 < chain.size()) {
            for (const auto& h : hs) {
                if (h(v.p) == 0.0) {
                    const PlanarPoint prev = chain[i - 1].p, next = chain[i + 1].p;
                    if (h(prev) * h(next) < 0.0 && labels_differ(map, prev, next)) {
                        v.crossing = true;
                    }
                }
            }
            if (v.crossing) ++count;
        }
        out.push_back(v);
        if (i + 1 == chain.size()) break;
        const PlanarPoint a = chain[i].p, b = chain[i + 1].p;
        std::vector<double> ts;
        for (const auto& h : hs) {
            const double ha = h(a), hb = h(b);
            if ((ha < 0.0 && hb > 0.0) || (ha > 0.0 && hb < 0.0)) ts.push_back(crossing_parameter(h, a, b, ha, hb));
        }
        std::sort(ts.begin(), ts.end());
        double prev_t = 0.0;
        for (std::size_t c = 0; c < ts.size(); ++c) {
            const double t = ts[c];
            const double next_t = c + 1 < ts.size() ? ts[c + 1] : 1.0;
            const PlanarPoint before = a + 0.5 * (prev_t + t) * (b - a);
            const PlanarPoint after = a + 0.5 * (t + next_t) * (b - a);
            if (labels_differ(map, before, after)) {
                out.push_back({a + t * (b - a), false, -1, true});
                ++count;
            }
            prev_t = t;
        }
    }
    chain = std::move(out);
    return count;
}

/// Image of a chain under the map; crossing vertices become kinks of age 1.
Chain map_chain(const PwsMap& map, const Chain& chain) {
    Chain out;
    out.reserve(chain.size());
    for (const Vertex& v : chain) {
        Vertex w;
        w.p = map.evaluate(v.p).image;
        if (v.kink) {
            w.kink = true;
            w.age = v.age + 1;
        } else if (v.crossing) {
            w.kink = true;
            w.age = 1;
        }
        out.push_back(w);
    }
    return out;
}

void densify(Chain& chain, std::size_t target) {
    if (chain.size() >= target || chain.size() < 2) return;
    const std::size_t per = (target + chain.size() - 2) / (chain.size() - 1);
    Chain out;
    out.reserve(per * chain.size());
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        out.push_back(chain[i]);
        for (std::size_t s = 1; s < per; ++s) {
            const double t = static_cast<double>(s) / static_cast<double>(per);
            out.push_back({chain[i].p + t * (chain[i + 1].p - chain[i].p), false, -1, false});
        }
    }
    out.push_back(chain.back());
    chain = std::move(out);
}

double chain_length(const Chain& c) {
    double len = 0.0;
    for (std::size_t i = 1; i < c.size(); ++i) len += distance(c[i - 1].p, c[i].p);
    return len;
}

void append(ManifoldPolyline& poly, const Chain& chain, int generation, bool skip_first) {
    for (std::size_t i = skip_first ? 1 : 0; i < chain.size(); ++i) {
        poly.vertices.push_back(chain[i].p);
        poly.kink.push_back(chain[i].kink);
        poly.kink_generation.push_back(chain[i].kink ? chain[i].age : -1);
        poly.generation.push_back(generation);
    }
}

/// Cuts the chain at the first vertex outside the escape radius. Returns true if cut.
bool cut_escaped(Chain& chain, double radius) {
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (!is_finite(chain[i].p) || norm(chain[i].p) > radius) {
            chain.resize(i);
            return true;
        }
    }
    return false;
}

/// Shortens the chain so its length is at most `length`.
void cut_length(Chain& chain, double length) {
    double acc = 0.0;
    for (std::size_t i = 1; i < chain.size(); ++i) {
        const double seg = distance(chain[i - 1].p, chain[i].p);
        if (acc + seg > length) {
            const double t = (length - acc) / seg;
            Vertex end{chain[i - 1].p + t * (chain[i].p - chain[i - 1].p), false, -1, false};
            chain.resize(i);
            chain.push_back(end);
            return;
        }
        acc += seg;
    }
}

SaddleData require_saddle(const SaddleData& s, double eig) {
    if (!(std::abs(s.sigma) > 1.0 && std::abs(s.lambda) < 1.0)) throw PreconditionError("input is not a saddle");
    if (eig == 0.0) throw PreconditionError("zero eigenvalue");
    return s;
}

}  // namespace

const char* to_string(ManifoldKind kind) { return kind == ManifoldKind::Stable ? "stable" : "unstable"; }

std::size_t ManifoldPolyline::kink_count() const {
    return static_cast<std::size_t>(std::count(kink.begin(), kink.end(), true));
}

double ManifoldPolyline::arclength() const {
    double len = 0.0;
    for (std::size_t i = 1; i < vertices.size(); ++i) len += distance(vertices[i - 1], vertices[i]);
    return len;
}

std::size_t StableManifold::kink_count() const {
    std::size_t n = 0;
    for (const auto& p : pieces) n += p.kink_count();
    return n;
}

ManifoldPolyline grow_unstable(const PwsMap& map, const SaddleData& saddle, const GrowthBudget& budget,
                               int direction) {
    require_saddle(saddle, saddle.sigma);
    ManifoldPolyline poly;
    poly.kind = ManifoldKind::Unstable;
    poly.saddle = saddle;
    poly.direction = direction >= 0 ? 1 : -1;
    poly.approximate = !map.is_piecewise_affine();

    const int steps = saddle.sigma < 0.0 ? 2 : 1;
    const PlanarPoint p = saddle.point + (poly.direction * budget.seed_distance) * saddle.v_u;
    const double growth = steps == 2 ? saddle.sigma * saddle.sigma : saddle.sigma;
    Chain chain{{p}, {saddle.point + growth * (p - saddle.point)}};

    double length = 0.0;
    for (std::size_t g = 0; g < budget.max_generations; ++g) {
        if (poly.approximate) densify(chain, budget.samples_per_generation);
        std::size_t crossings = split_chain(map, chain);
        std::size_t fresh = 0;
        for (const Vertex& v : chain) {
            if (v.kink && v.age <= steps) ++fresh;
        }
        bool stop = false;
        const double len = chain_length(chain);
        if (length + len > budget.max_arclength) {
            cut_length(chain, budget.max_arclength - length);
            stop = true;
        }
        if (poly.vertices.size() + chain.size() > budget.max_vertices) {
            chain.resize(budget.max_vertices > poly.vertices.size() ? budget.max_vertices - poly.vertices.size() : 0);
            stop = true;
        }
        append(poly, chain, static_cast<int>(g), g > 0);
        poly.new_kinks_per_generation.push_back(fresh);
        length += chain_length(chain);
        if (stop || g + 1 == budget.max_generations) {
            poly.crossings_per_generation.push_back(crossings);
            break;
        }

        Chain next = map_chain(map, chain);
        for (int s = 1; s < steps; ++s) {
            crossings += split_chain(map, next);
            next = map_chain(map, next);
        }
        poly.crossings_per_generation.push_back(crossings);
        if (cut_escaped(next, budget.escape_radius)) {
            poly.truncated = true;
            if (next.size() >= 2) {
                split_chain(map, next);
                append(poly, next, static_cast<int>(g + 1), true);
            }
            break;
        }
        chain = std::move(next);
    }
    return poly;
}

namespace {

/// Parts of `chain` inside the closed half-plane side * h >= 0, with the cut
/// points flagged as crossings.
std::vector<Chain> clip_half_plane(const Chain& chain, const Poly2& h, Side side) {
    auto value = [&](PlanarPoint p) { return side == Side::NonPositive ? -h(p) : h(p); };
    std::vector<Chain> runs;
    Chain run;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const double vi = value(chain[i].p);
        if (vi >= 0.0) {
            run.push_back(chain[i]);
            // re-entry exactly at a vertex
            if (run.size() == 1 && i > 0 && value(chain[i - 1].p) < 0.0) run.back().crossing = true;
        }
        if (i + 1 == chain.size()) break;
        const double vn = value(chain[i + 1].p);
        if ((vi > 0.0 && vn < 0.0) || (vi < 0.0 && vn > 0.0)) {
            const double t = vi / (vi - vn);
            run.push_back({chain[i].p + t * (chain[i + 1].p - chain[i].p), false, -1, true});
            if (vi > 0.0) {
                runs.push_back(std::move(run));
                run.clear();
            }
        } else if (vi == 0.0 && vn < 0.0) {
            run.back().crossing = true;
            runs.push_back(std::move(run));
            run.clear();
        }
    }
    if (!run.empty()) runs.push_back(std::move(run));
    std::vector<Chain> out;
    for (auto& r : runs) {
        if (r.size() >= 2 && chain_length(r) > 0.0) out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

StableManifold grow_stable(const PwsMap& map, const SaddleData& saddle, const GrowthBudget& budget, int direction) {
    require_saddle(saddle, saddle.lambda);
    if (!map.is_piecewise_affine()) throw PreconditionError("stable growth needs a piecewise-affine map");
    const int dir = direction >= 0 ? 1 : -1;
    const int steps = saddle.lambda < 0.0 ? 2 : 1;
    const double shrink = steps == 2 ? saddle.lambda * saddle.lambda : saddle.lambda;
    const PlanarPoint p = saddle.point + (dir * budget.seed_distance) * saddle.v_s;

    struct Node {
        Chain chain;
        std::vector<std::size_t> word;
    };
    StableManifold out;
    std::size_t vertices = 0;
    double length = 0.0;

    auto record = [&](const Node& node, int generation) {
        ManifoldPolyline poly;
        poly.kind = ManifoldKind::Stable;
        poly.saddle = saddle;
        poly.direction = dir;
        poly.branch_word = node.word;
        append(poly, node.chain, generation, false);
        vertices += poly.size();
        length += poly.arclength();
        out.pieces.push_back(std::move(poly));
    };

    // One backward step of every node under every invertible piece.
    auto preimages = [&](const std::vector<Node>& nodes) {
        std::vector<Node> next;
        for (const Node& node : nodes) {
            for (std::size_t j = 0; j < map.size(); ++j) {
                const Piece& piece = map.piece(j);
                const Mat2 a = piece.linear_part();
                if (a.det() == 0.0) {
                    out.truncated = true;
                    continue;
                }
                const Mat2 inv = a.inverse();
                Chain pre;
                pre.reserve(node.chain.size());
                for (const Vertex& v : node.chain) {
                    Vertex w;
                    w.p = inv * (v.p - piece.offset());
                    if (v.kink) {
                        w.kink = true;
                        w.age = v.age + 1;
                    }
                    pre.push_back(w);
                }
                std::vector<Chain> parts{std::move(pre)};
                for (const auto& c : map.region(j)) {
                    std::vector<Chain> clipped;
                    for (const auto& part : parts) {
                        for (auto& piece_part : clip_half_plane(part, map.switching()[c.switching], c.side)) {
                            clipped.push_back(std::move(piece_part));
                        }
                    }
                    parts = std::move(clipped);
                }
                for (auto& part : parts) {
                    for (Vertex& v : part) {
                        if (!v.crossing) continue;
                        v.crossing = false;
                        if (v.kink) continue;
                        // a junction with another piece's preimage is a kink of age 0
                        for (std::size_t other : map.labels_at(v.p, 1e-9)) {
                            if (other != j && !same_piece(map.piece(other), piece)) {
                                v.kink = true;
                                v.age = 0;
                                break;
                            }
                        }
                    }
                    if (cut_escaped(part, budget.escape_radius)) out.truncated = true;
                    if (part.size() < 2) continue;
                    Node child{std::move(part), node.word};
                    child.word.push_back(j);
                    next.push_back(std::move(child));
                }
            }
        }
        return next;
    };

    std::vector<Node> frontier{{Chain{{p}, {saddle.point + (1.0 / shrink) * (p - saddle.point)}}, {}}};
    for (std::size_t g = 0; g < budget.max_generations && !frontier.empty(); ++g) {
        for (const Node& node : frontier) {
            if (vertices >= budget.max_vertices || length >= budget.max_arclength) return out;
            record(node, static_cast<int>(g));
        }
        if (g + 1 == budget.max_generations) break;
        std::vector<Node> next = preimages(frontier);
        for (int s = 1; s < steps; ++s) next = preimages(next);
        frontier = std::move(next);
    }
    return out;
}

ManifoldSet grow_manifolds(const PwsMap& map, const SaddleData& saddle, const GrowthBudget& budget,
                           std::size_t workers) {
    ManifoldSet set;
    parallel_for(4, workers, [&](std::size_t i) {
        switch (i) {
            case 0: set.unstable_plus = grow_unstable(map, saddle, budget, 1); break;
            case 1: set.unstable_minus = grow_unstable(map, saddle, budget, -1); break;
            case 2: set.stable_plus = grow_stable(map, saddle, budget, 1); break;
            default: set.stable_minus = grow_stable(map, saddle, budget, -1); break;
        }
    });
    return set;
}

namespace {

std::pair<double, PlanarPoint> point_segment(PlanarPoint p, PlanarPoint a, PlanarPoint b) {
    const Vec2 d = b - a;
    const double len2 = dot(d, d);
    double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const PlanarPoint q = a + t * d;
    return {distance(p, q), q};
}

/// Parameters (s, t) of the proper intersection of [a0,a1] and [b0,b1], if any.
bool segment_intersection(PlanarPoint a0, PlanarPoint a1, PlanarPoint b0, PlanarPoint b1, double& s, double& t) {
    const Vec2 r = a1 - a0, q = b1 - b0;
    const double den = cross(r, q);
    if (den == 0.0) return false;
    s = cross(b0 - a0, q) / den;
    t = cross(b0 - a0, r) / den;
    return s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0;
}

struct Box {
    double x0, y0, x1, y1;
    std::size_t first, last;  // segment index range [first, last)
};

constexpr std::size_t kChunk = 32;

std::vector<Box> chunk_boxes(const std::vector<PlanarPoint>& v) {
    std::vector<Box> boxes;
    if (v.size() < 2) return boxes;
    const std::size_t segs = v.size() - 1;
    for (std::size_t first = 0; first < segs; first += kChunk) {
        const std::size_t last = std::min(segs, first + kChunk);
        Box b{v[first].x, v[first].y, v[first].x, v[first].y, first, last};
        for (std::size_t i = first; i <= last; ++i) {
            b.x0 = std::min(b.x0, v[i].x);
            b.y0 = std::min(b.y0, v[i].y);
            b.x1 = std::max(b.x1, v[i].x);
            b.y1 = std::max(b.y1, v[i].y);
        }
        boxes.push_back(b);
    }
    return boxes;
}

double box_gap(const Box& a, const Box& b) {
    const double dx = std::max({0.0, a.x0 - b.x1, b.x0 - a.x1});
    const double dy = std::max({0.0, a.y0 - b.y1, b.y0 - a.y1});
    return std::hypot(dx, dy);
}

}  // namespace

std::vector<PlanarPoint> beyond_radius(const std::vector<PlanarPoint>& vertices, PlanarPoint center, double radius) {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (distance(vertices[i], center) <= radius) continue;
        std::vector<PlanarPoint> out;
        if (i > 0) {
            // exit point on the circle along segment i-1 -> i
            const Vec2 a = vertices[i - 1] - center, d = vertices[i] - vertices[i - 1];
            const double qa = dot(d, d), qb = 2.0 * dot(a, d), qc = dot(a, a) - radius * radius;
            const double t = (-qb + std::sqrt(std::max(0.0, qb * qb - 4.0 * qa * qc))) / (2.0 * qa);
            out.push_back(vertices[i - 1] + std::clamp(t, 0.0, 1.0) * d);
        }
        out.insert(out.end(), vertices.begin() + static_cast<std::ptrdiff_t>(i), vertices.end());
        return out;
    }
    return {};
}

DistanceWitness segment_distance(PlanarPoint a0, PlanarPoint a1, PlanarPoint b0, PlanarPoint b1) {
    DistanceWitness w;
    double s = 0.0, t = 0.0;
    if (segment_intersection(a0, a1, b0, b1, s, t)) {
        w.distance = 0.0;
        w.on_a = a0 + s * (a1 - a0);
        w.on_b = w.on_a;
        return w;
    }
    w.distance = std::numeric_limits<double>::infinity();
    auto consider = [&](double d, PlanarPoint pa, PlanarPoint pb) {
        if (d < w.distance) {
            w.distance = d;
            w.on_a = pa;
            w.on_b = pb;
        }
    };
    {
        auto [d, q] = point_segment(a0, b0, b1);
        consider(d, a0, q);
    }
    {
        auto [d, q] = point_segment(a1, b0, b1);
        consider(d, a1, q);
    }
    {
        auto [d, q] = point_segment(b0, a0, a1);
        consider(d, q, b0);
    }
    {
        auto [d, q] = point_segment(b1, a0, a1);
        consider(d, q, b1);
    }
    return w;
}

DistanceWitness polyline_min_distance(const std::vector<PlanarPoint>& a, const std::vector<PlanarPoint>& b) {
    DistanceWitness best;
    best.distance = std::numeric_limits<double>::infinity();
    if (a.empty() || b.empty()) return best;
    if (a.size() == 1 || b.size() == 1) {
        // degenerate: treat a lone vertex as a zero-length segment
        const auto& pa = a.size() == 1 ? std::vector<PlanarPoint>{a[0], a[0]} : a;
        const auto& pb = b.size() == 1 ? std::vector<PlanarPoint>{b[0], b[0]} : b;
        return polyline_min_distance(pa, pb);
    }
    const auto ba = chunk_boxes(a), bb = chunk_boxes(b);
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    pairs.reserve(ba.size() * bb.size());
    for (std::size_t i = 0; i < ba.size(); ++i) {
        for (std::size_t j = 0; j < bb.size(); ++j) pairs.emplace_back(box_gap(ba[i], bb[j]), i, j);
    }
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [gap, i, j] : pairs) {
        if (gap > best.distance) break;
        for (std::size_t s = ba[i].first; s < ba[i].last; ++s) {
            for (std::size_t t = bb[j].first; t < bb[j].last; ++t) {
                DistanceWitness w = segment_distance(a[s], a[s + 1], b[t], b[t + 1]);
                if (w.distance < best.distance) {
                    best = w;
                    best.segment_a = s;
                    best.segment_b = t;
                }
            }
        }
        if (best.distance == 0.0) break;
    }
    return best;
}

DistanceWitness polyline_min_distance(const ManifoldPolyline& a, const ManifoldPolyline& b) {
    return polyline_min_distance(a.vertices, b.vertices);
}

DistanceWitness polyline_min_distance(const std::vector<ManifoldPolyline>& a, const std::vector<ManifoldPolyline>& b) {
    DistanceWitness best;
    best.distance = std::numeric_limits<double>::infinity();
    for (const auto& pa : a) {
        for (const auto& pb : b) {
            const DistanceWitness w = polyline_min_distance(pa, pb);
            if (w.distance < best.distance) best = w;
        }
    }
    return best;
}

std::vector<Crossing> transverse_intersections(const std::vector<PlanarPoint>& a, const std::vector<PlanarPoint>& b,
                                               double angle_tolerance) {
    std::vector<Crossing> out;
    const auto ba = chunk_boxes(a), bb = chunk_boxes(b);
    for (const Box& x : ba) {
        for (const Box& y : bb) {
            if (box_gap(x, y) > 0.0) continue;
            for (std::size_t s = x.first; s < x.last; ++s) {
                for (std::size_t t = y.first; t < y.last; ++t) {
                    double u = 0.0, v = 0.0;
                    if (!segment_intersection(a[s], a[s + 1], b[t], b[t + 1], u, v)) continue;
                    // half-open so a crossing at a shared vertex is counted once
                    if ((u == 1.0 && s + 2 < a.size()) || (v == 1.0 && t + 2 < b.size())) continue;
                    const Vec2 da = a[s + 1] - a[s], db = b[t + 1] - b[t];
                    double angle = std::atan2(std::abs(cross(da, db)), std::abs(dot(da, db)));
                    if (angle < angle_tolerance) continue;
                    out.push_back({a[s] + u * da, angle, s, t});
                }
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Crossing& p, const Crossing& q) {
        return std::tie(p.segment_a, p.segment_b) < std::tie(q.segment_a, q.segment_b);
    });
    return out;
}

std::vector<Crossing> transverse_intersections(const ManifoldPolyline& a, const ManifoldPolyline& b,
                                               double angle_tolerance) {
    return transverse_intersections(a.vertices, b.vertices, angle_tolerance);
}

}  // namespace corner
