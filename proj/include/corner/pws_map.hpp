#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corner/geometry.hpp"

namespace corner {

inline constexpr double kDefaultEscapeRadius = 1e6;
inline constexpr double kDefaultContinuityTolerance = 1e-10;

/// Polynomial in (x, y) of total degree at most three.
///
/// Coefficients are stored in the monomial order
/// 1, x, y, x^2, xy, y^2, x^3, x^2y, xy^2, y^3.
class Poly2 {
public:
    static constexpr std::size_t kTerms = 10;
    static constexpr std::array<std::pair<int, int>, kTerms> kExponents{{
        {0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}}};
    static constexpr std::array<std::string_view, kTerms> kNames{
        "1", "x", "y", "x2", "xy", "y2", "x3", "x2y", "xy2", "y3"};

    Poly2() = default;
    explicit Poly2(const std::array<double, kTerms>& coefficients) : c_(coefficients) {}

    static Poly2 affine(double constant, double cx, double cy) {
        Poly2 p;
        p.c_[0] = constant;
        p.c_[1] = cx;
        p.c_[2] = cy;
        return p;
    }

    double operator()(Vec2 p) const;
    Vec2 gradient(Vec2 p) const;
    int degree() const;

    const std::array<double, kTerms>& coefficients() const { return c_; }
    double& operator[](std::size_t i) { return c_[i]; }
    double operator[](std::size_t i) const { return c_[i]; }

    friend bool operator==(const Poly2&, const Poly2&) = default;

private:
    std::array<double, kTerms> c_{};
};

/// One smooth component f_j of a piecewise-smooth map.
struct Piece {
    std::string label;
    Poly2 fx;
    Poly2 fy;

    Vec2 operator()(Vec2 p) const { return {fx(p), fy(p)}; }
    Mat2 jacobian(Vec2 p) const;
    bool is_affine() const { return fx.degree() <= 1 && fy.degree() <= 1; }
    /// Linear part and offset; only meaningful for affine pieces.
    Mat2 linear_part() const { return {fx[1], fx[2], fy[1], fy[2]}; }
    Vec2 offset() const { return {fx[0], fy[0]}; }
    friend bool operator==(const Piece&, const Piece&) = default;
};

enum class Side { NonPositive, NonNegative };

/// Region membership test `h_switching(p) <= 0` or `>= 0`.
struct Constraint {
    std::size_t switching = 0;
    Side side = Side::NonPositive;
    friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct Evaluation {
    Vec2 image;
    std::size_t label = 0;
};

struct NamedParam {
    std::string name;
    double value = 0.0;
};

/// A continuous planar map given by finitely many polynomial pieces on closed
/// regions cut out by polynomial switching functions.
///
/// Points on a switching manifold belong to every adjacent region; when a
/// single label is needed the smallest label index wins.
class PwsMap {
public:
    PwsMap(std::vector<Piece> pieces, std::vector<Poly2> switching,
           std::vector<std::vector<Constraint>> regions, std::string kind = "polynomial",
           std::vector<NamedParam> params = {});

    std::size_t size() const { return pieces_.size(); }
    const Piece& piece(std::size_t label) const { return pieces_.at(label); }
    const std::vector<Piece>& pieces() const { return pieces_; }
    const std::vector<Poly2>& switching() const { return switching_; }
    const std::vector<Constraint>& region(std::size_t label) const { return regions_.at(label); }

    const std::string& kind() const { return kind_; }
    const std::vector<NamedParam>& params() const { return params_; }
    std::optional<double> param(std::string_view name) const;
    std::optional<std::size_t> label_index(std::string_view label) const;

    bool is_piecewise_affine() const { return affine_; }

    /// Every label whose closed region contains p, switching values relaxed by tol.
    std::vector<std::size_t> labels_at(Vec2 p, double tol = 0.0) const;
    bool in_region(std::size_t label, Vec2 p, double tol = 0.0) const;
    /// Tie-broken label of p. Throws InvalidPointError when p is in no region.
    std::size_t region_of(Vec2 p) const;
    /// Signed distance of p into the closed region `label`; negative outside.
    double margin(std::size_t label, Vec2 p) const;

    Evaluation evaluate(Vec2 p) const;
    Mat2 jacobian(std::size_t label, Vec2 p) const { return pieces_.at(label).jacobian(p); }

    /// Largest disagreement between the pieces of every region containing p.
    double continuity_defect(Vec2 p, double tol = kDefaultContinuityTolerance) const;

private:
    std::vector<Piece> pieces_;
    std::vector<Poly2> switching_;
    std::vector<std::vector<Constraint>> regions_;
    std::string kind_;
    std::vector<NamedParam> params_;
    bool affine_ = true;
};

/// A finite word of piece labels.
struct Itinerary {
    std::vector<std::size_t> letters;

    std::size_t size() const { return letters.size(); }
    bool empty() const { return letters.empty(); }
    std::size_t operator[](std::size_t i) const { return letters[i]; }
    friend bool operator==(const Itinerary&, const Itinerary&) = default;
    friend auto operator<=>(const Itinerary&, const Itinerary&) = default;
};

Itinerary parse_itinerary(const PwsMap& map, std::string_view word);
std::string format_itinerary(const PwsMap& map, const Itinerary& itin);
Itinerary rotate(const Itinerary& itin, std::size_t shift);
Itinerary repeat(std::size_t letter, std::size_t count);
Itinerary concat(const Itinerary& a, const Itinerary& b);

struct Composition {
    Vec2 point;
    Mat2 jacobian;
};

/// f_L(p) and the chain-rule Jacobian along the word. Regions are not checked.
Composition compose_along(const PwsMap& map, const Itinerary& itin, Vec2 p);

struct OrbitSegment {
    std::vector<Vec2> points;
    /// Tie-broken label of each point; points[i+1] is the image of points[i]
    /// under piece realized[i].
    Itinerary realized;
    bool escaped = false;
    std::size_t escape_index = 0;
};

OrbitSegment iterate(const PwsMap& map, Vec2 p, std::size_t n,
                     double escape_radius = kDefaultEscapeRadius);

/// Largest Lyapunov exponent by tangent-vector norm growth with per-step
/// renormalisation. Throws EscapeError if the orbit leaves the escape radius.
double lyapunov_exponent(const PwsMap& map, Vec2 p, std::size_t n_transient,
                         std::size_t n_sample, double escape_radius = kDefaultEscapeRadius);

/// Solution of p = A p + b. Throws NoFixedPointError if I - A is singular.
Vec2 affine_fixed_point(const Mat2& a, Vec2 b);

}  // namespace corner
