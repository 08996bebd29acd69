#pragma once

#include <cmath>
#include <complex>
#include <utility>

namespace corner {

/// A point or vector in the phase plane.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

using PlanarPoint = Vec2;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Unit vector with the sign fixed so the first nonzero component is positive.
inline Vec2 canonical_direction(Vec2 v) {
    const double n = norm(v);
    if (n == 0.0) return v;
    v = v / n;
    if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = -v;
    return v;
}

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    constexpr double trace() const { return a + d; }
    constexpr double det() const { return a * d - b * c; }
    constexpr Mat2 inverse() const {
        const double dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    friend constexpr Mat2 operator*(const Mat2& m, const Mat2& n) {
        return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
                m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
    }
    friend constexpr Vec2 operator*(const Mat2& m, Vec2 v) {
        return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
    }
    friend constexpr Mat2 operator-(const Mat2& m, const Mat2& n) {
        return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d};
    }
    friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

/// Roots of g^2 - trace g + det, ordered by increasing modulus.
inline std::pair<std::complex<double>, std::complex<double>> eigenvalues(double trace, double det) {
    const double disc = trace * trace - 4.0 * det;
    if (disc >= 0.0) {
        // Stable quadratic formula: avoid cancellation in the small root.
        const double s = std::sqrt(disc);
        const double q = trace >= 0.0 ? 0.5 * (trace + s) : 0.5 * (trace - s);
        double big = q;
        double small = q != 0.0 ? det / q : 0.0;
        if (q == 0.0) { big = 0.5 * s; small = -0.5 * s; }
        if (std::abs(small) > std::abs(big)) std::swap(small, big);
        return {{small, 0.0}, {big, 0.0}};
    }
    const double re = 0.5 * trace;
    const double im = 0.5 * std::sqrt(-disc);
    return {{re, -im}, {re, im}};
}

inline double spectral_radius(double trace, double det) {
    return std::abs(eigenvalues(trace, det).second);
}

}  // namespace corner
