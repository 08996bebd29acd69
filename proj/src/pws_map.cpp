#include "corner/pws_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "corner/errors.hpp"

namespace corner {

double Poly2::operator()(Vec2 p) const {
    const double x = p.x, y = p.y;
    return c_[0] + c_[1] * x + c_[2] * y + c_[3] * x * x + c_[4] * x * y + c_[5] * y * y +
           c_[6] * x * x * x + c_[7] * x * x * y + c_[8] * x * y * y + c_[9] * y * y * y;
}

Vec2 Poly2::gradient(Vec2 p) const {
    const double x = p.x, y = p.y;
    return {c_[1] + 2.0 * c_[3] * x + c_[4] * y + 3.0 * c_[6] * x * x + 2.0 * c_[7] * x * y +
                c_[8] * y * y,
            c_[2] + c_[4] * x + 2.0 * c_[5] * y + c_[7] * x * x + 2.0 * c_[8] * x * y +
                3.0 * c_[9] * y * y};
}

int Poly2::degree() const {
    int deg = 0;
    for (std::size_t i = 0; i < kTerms; ++i) {
        if (c_[i] != 0.0) deg = std::max(deg, kExponents[i].first + kExponents[i].second);
    }
    return deg;
}

Mat2 Piece::jacobian(Vec2 p) const {
    const Vec2 gx = fx.gradient(p);
    const Vec2 gy = fy.gradient(p);
    return {gx.x, gx.y, gy.x, gy.y};
}

PwsMap::PwsMap(std::vector<Piece> pieces, std::vector<Poly2> switching,
               std::vector<std::vector<Constraint>> regions, std::string kind,
               std::vector<NamedParam> params)
    : pieces_(std::move(pieces)),
      switching_(std::move(switching)),
      regions_(std::move(regions)),
      kind_(std::move(kind)),
      params_(std::move(params)) {
    if (pieces_.empty()) throw Error("map needs at least one piece");
    if (regions_.size() != pieces_.size()) throw Error("one region per piece is required");
    for (const auto& region : regions_) {
        for (const auto& c : region) {
            if (c.switching >= switching_.size()) throw Error("region refers to unknown switching function");
        }
    }
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        for (std::size_t j = i + 1; j < pieces_.size(); ++j) {
            if (pieces_[i].label == pieces_[j].label) throw Error("duplicate piece label " + pieces_[i].label);
        }
    }
    affine_ = std::all_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.is_affine(); }) &&
              std::all_of(switching_.begin(), switching_.end(), [](const Poly2& h) { return h.degree() <= 1; });
}

std::optional<double> PwsMap::param(std::string_view name) const {
    for (const auto& p : params_) {
        if (p.name == name) return p.value;
    }
    return std::nullopt;
}

std::optional<std::size_t> PwsMap::label_index(std::string_view label) const {
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        if (pieces_[i].label == label) return i;
    }
    return std::nullopt;
}

bool PwsMap::in_region(std::size_t label, Vec2 p, double tol) const {
    for (const auto& c : regions_[label]) {
        const double h = switching_[c.switching](p);
        const double v = c.side == Side::NonPositive ? -h : h;
        if (v < -tol) return false;
    }
    return true;
}

std::vector<std::size_t> PwsMap::labels_at(Vec2 p, double tol) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < pieces_.size(); ++j) {
        if (in_region(j, p, tol)) out.push_back(j);
    }
    return out;
}

std::size_t PwsMap::region_of(Vec2 p) const {
    if (!is_finite(p)) throw InvalidPointError("non-finite phase point");
    for (std::size_t j = 0; j < pieces_.size(); ++j) {
        if (in_region(j, p)) return j;
    }
    throw InvalidPointError("point lies in no region of the map");
}

double PwsMap::margin(std::size_t label, Vec2 p) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : regions_.at(label)) {
        const Poly2& h = switching_[c.switching];
        const double g = norm(h.gradient(p));
        double v = h(p);
        if (g > 0.0) v /= g;
        m = std::min(m, c.side == Side::NonPositive ? -v : v);
    }
    return m;
}

Evaluation PwsMap::evaluate(Vec2 p) const {
    const std::size_t label = region_of(p);
    return {pieces_[label](p), label};
}

double PwsMap::continuity_defect(Vec2 p, double tol) const {
    const auto labels = labels_at(p, tol);
    double worst = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t j = i + 1; j < labels.size(); ++j) {
            worst = std::max(worst, distance(pieces_[labels[i]](p), pieces_[labels[j]](p)));
        }
    }
    return worst;
}

Itinerary parse_itinerary(const PwsMap& map, std::string_view word) {
    Itinerary itin;
    const bool single_char = std::all_of(map.pieces().begin(), map.pieces().end(),
                                         [](const Piece& p) { return p.label.size() == 1; });
    if (single_char && word.find(',') == std::string_view::npos) {
        for (char ch : word) {
            auto idx = map.label_index(std::string_view(&ch, 1));
            if (!idx) throw Error(std::string("unknown itinerary letter '") + ch + "'");
            itin.letters.push_back(*idx);
        }
    } else {
        std::size_t start = 0;
        while (start <= word.size()) {
            const std::size_t end = std::min(word.find(',', start), word.size());
            auto token = word.substr(start, end - start);
            auto idx = map.label_index(token);
            if (!idx) throw Error("unknown itinerary letter '" + std::string(token) + "'");
            itin.letters.push_back(*idx);
            start = end + 1;
        }
    }
    if (itin.empty()) throw Error("empty itinerary");
    return itin;
}

std::string format_itinerary(const PwsMap& map, const Itinerary& itin) {
    const bool single_char = std::all_of(map.pieces().begin(), map.pieces().end(),
                                         [](const Piece& p) { return p.label.size() == 1; });
    std::string out;
    for (std::size_t i = 0; i < itin.size(); ++i) {
        if (!single_char && i > 0) out += ',';
        out += map.piece(itin[i]).label;
    }
    return out;
}

Itinerary rotate(const Itinerary& itin, std::size_t shift) {
    Itinerary out = itin;
    if (!itin.empty()) {
        std::rotate(out.letters.begin(), out.letters.begin() + static_cast<std::ptrdiff_t>(shift % itin.size()),
                    out.letters.end());
    }
    return out;
}

Itinerary repeat(std::size_t letter, std::size_t count) {
    return Itinerary{std::vector<std::size_t>(count, letter)};
}

Itinerary concat(const Itinerary& a, const Itinerary& b) {
    Itinerary out = a;
    out.letters.insert(out.letters.end(), b.letters.begin(), b.letters.end());
    return out;
}

Composition compose_along(const PwsMap& map, const Itinerary& itin, Vec2 p) {
    Mat2 jac = Mat2::identity();
    for (std::size_t letter : itin.letters) {
        const Piece& piece = map.piece(letter);
        jac = piece.jacobian(p) * jac;
        p = piece(p);
    }
    return {p, jac};
}

OrbitSegment iterate(const PwsMap& map, Vec2 p, std::size_t n, double escape_radius) {
    if (!is_finite(p)) throw InvalidPointError("non-finite initial point");
    OrbitSegment orbit;
    orbit.points.reserve(n + 1);
    orbit.realized.letters.reserve(n + 1);
    orbit.points.push_back(p);
    orbit.realized.letters.push_back(map.region_of(p));
    for (std::size_t i = 0; i < n; ++i) {
        p = map.piece(orbit.realized.letters.back())(p);
        orbit.points.push_back(p);
        if (!is_finite(p) || norm(p) > escape_radius) {
            orbit.escaped = true;
            orbit.escape_index = i + 1;
            orbit.realized.letters.push_back(is_finite(p) ? map.region_of(p) : orbit.realized.letters.back());
            break;
        }
        orbit.realized.letters.push_back(map.region_of(p));
    }
    return orbit;
}

double lyapunov_exponent(const PwsMap& map, Vec2 p, std::size_t n_transient, std::size_t n_sample,
                         double escape_radius) {
    if (n_sample == 0) throw Error("lyapunov_exponent needs at least one sample step");
    Vec2 v{1.0, 0.0};
    double sum = 0.0;
    const std::size_t total = n_transient + n_sample;
    for (std::size_t i = 0; i < total; ++i) {
        const std::size_t label = map.region_of(p);
        const Piece& piece = map.piece(label);
        v = piece.jacobian(p) * v;
        p = piece(p);
        const double len = norm(v);
        v = v / len;
        if (i >= n_transient) sum += std::log(len);
        if (!is_finite(p) || norm(p) > escape_radius) {
            std::ostringstream msg;
            msg << "orbit escaped after " << (i + 1) << " iterations";
            throw EscapeError(msg.str());
        }
    }
    return sum / static_cast<double>(n_sample);
}

Vec2 affine_fixed_point(const Mat2& a, Vec2 b) {
    const Mat2 m = Mat2::identity() - a;
    const double dt = m.det();
    const double scale = std::max({1.0, std::abs(a.a), std::abs(a.b), std::abs(a.c), std::abs(a.d)});
    if (dt == 0.0 || std::abs(dt) < 1e-14 * scale * scale) {
        throw NoFixedPointError("affine map has an eigenvalue equal to one");
    }
    return m.inverse() * b;
}

}  // namespace corner
