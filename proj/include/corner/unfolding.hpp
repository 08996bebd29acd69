#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "corner/normal_form.hpp"
#include "corner/periodic.hpp"
#include "corner/pws_map.hpp"

namespace corner {

/// Local constants of a generic homoclinic corner in linearised coordinates.
/// The saddle sits at the origin with E^s and E^u along the axes, the corner
/// orbit passes (0, 1) and returns r iterates later; h = y - 1 + p1 x + p3 xi
/// with p2 = 1.
struct UnfoldingParams {
    double lambda = 0.5;
    double sigma = 1.5;
    std::size_t r = 3;
    std::size_t s = 1;
    double a1 = 0.0;
    double a2 = 1.0;
    double bX1 = 0.0;
    double bX2 = -1.0;
    double bY1 = 0.0;
    double bY2 = 1.0;
    double c1 = 0.0;
    double c2 = 1.0;
    double p1 = 0.0;
    double p3 = 0.0;

    double b1(Branch b) const { return b == Branch::X ? bX1 : bY1; }
    double b2(Branch b) const { return b == Branch::X ? bX2 : bY2; }
    friend bool operator==(const UnfoldingParams&, const UnfoldingParams&) = default;
};

struct GenericityCondition {
    std::string name;
    bool pass = false;
    /// Positive when satisfied; how far from failing.
    double margin = 0.0;
};

struct GenericityReport {
    std::vector<GenericityCondition> conditions;

    bool ok() const;
    /// Names of the failing conditions, comma separated.
    std::string failures() const;
};

GenericityReport validate_genericity(const UnfoldingParams& u);

struct BranchPrediction {
    double x = 0.0;
    double y = 0.0;
    double trace = 0.0;
    double det = 0.0;
    double gamma_u = 0.0;
    double gamma_s = 0.0;
    Vec2 v_u;  ///< in normal-form coordinates
    Vec2 v_s;
};

/// Leading-order asymptotics. Error orders: xi_k O(lambda^k) + O(sigma^-2k);
/// x O(sigma^-2k); y O(lambda^k) + O(sigma^-2k); trace O(1); det O(lambda^k);
/// gamma_u O(1); gamma_s O(lambda^k sigma^-k); eigenvectors O(lambda^k sigma^-k), O(sigma^-2k).
struct Predictions {
    std::size_t k = 0;
    double xi = 0.0;
    double xi_k = 0.0;
    /// Sign of xi - xi_k on which both single-round orbits are admissible.
    int admissible_side = 0;
    BranchPrediction X;
    BranchPrediction Y;

    const BranchPrediction& branch(Branch b) const { return b == Branch::X ? X : Y; }
};

/// Throws GenericityError when a condition fails.
Predictions predict(const UnfoldingParams& u, std::size_t k, double xi);

/// Coefficients of the O(2) remainder shared by both pieces, over the
/// monomials x^2, x(y-1), (y-1)^2, x xi, (y-1) xi, xi^2.
struct QuadraticRemainder {
    std::array<double, 6> first{};
    std::array<double, 6> second{};

    bool zero() const;
};

inline constexpr const char* kRemainderMonomials[6] = {"x2", "xY", "Y2", "xxi", "Yxi", "xi2"};

/// The return map G_k = f_{S 1^k} at parameter xi: piece "X" on h <= 0 and
/// piece "Y" on h >= 0.
PwsMap build_synthetic_map(const UnfoldingParams& u, std::size_t k, double xi, const QuadraticRemainder& rem = {});

MapFamily synthetic_family(const UnfoldingParams& u, std::size_t k, const QuadraticRemainder& rem = {});

/// Exact values for zero remainder.
struct SyntheticOracle {
    double xi_k = 0.0;
    /// x-coordinate of the colliding fixed point (y = 1 - p1 x - p3 xi_k there).
    double x_star = 0.0;
};

SyntheticOracle synthetic_oracle(const UnfoldingParams& u, std::size_t k);
/// Fixed point of piece `branch` of the zero-remainder map.
PlanarPoint synthetic_fixed_point(const UnfoldingParams& u, std::size_t k, double xi, Branch branch);

/// BCB of the single-round orbit located numerically on the synthetic map,
/// bracketed by geometric growth from the leading-order prediction.
BcbResult locate_synthetic_bcb(const UnfoldingParams& u, std::size_t k, const QuadraticRemainder& rem = {});

/// Linearisation about the BCB in coordinates xh = x - x*, yh = h(x, y; xi),
/// xih = xi - xi_k; exact for zero remainder.
struct HattedMap {
    std::size_t k = 0;
    double xi_k = 0.0;
    double x_star = 0.0;
    double a1 = 0.0, a2 = 0.0;
    double bX1 = 0.0, bX2 = 0.0, bY1 = 0.0, bY2 = 0.0;
    double c1 = 0.0, c2 = 0.0;

    double b1(Branch b) const { return b == Branch::X ? bX1 : bY1; }
    double b2(Branch b) const { return b == Branch::X ? bX2 : bY2; }
    Mat2 linear_part(Branch b) const { return {a1, b1(b), a2, b2(b)}; }
    /// The affine map in hatted coordinates, switching on yh = 0.
    PwsMap map(double xi_hat) const;
};

HattedMap hatted_transform(const UnfoldingParams& u, std::size_t k, double xi_k, double x_star,
                           const QuadraticRemainder& rem = {});
/// Zero remainder, BCB from the closed form.
HattedMap hatted_transform(const UnfoldingParams& u, std::size_t k);

/// (xt, yt) = P (xh, yh) + q xih and xit = xi_scale xih put the hatted map in
/// normal form.
struct TildedTransform {
    ReducedNormalFormParams params;
    Mat2 P;
    Vec2 q;
    double xi_scale = 0.0;

    PlanarPoint forward(PlanarPoint hat, double xi_hat) const { return P * hat + xi_hat * q; }
    PlanarPoint inverse(PlanarPoint tilde, double xi_hat) const { return P.inverse() * (tilde - xi_hat * q); }
};

/// Throws NonObservableError when a2 or c2 of the hatted map vanishes.
TildedTransform tilded_transform(const HattedMap& h);

struct SignQuadrant {
    int sign_c2 = 1;
    int sign_bX2 = 1;
    int bcb_side = 1;        ///< sign of xi_k
    int existence_side = 1;  ///< sign of xi - xi_k where both orbits are admissible
};

/// The predicted table for all four sign combinations.
std::vector<SignQuadrant> quadrant_table();

/// Observed signs on the synthetic map.
SignQuadrant observe_quadrant(const UnfoldingParams& u, std::size_t k);
/// One observation per row of quadrant_table(), on a fixed generic map at k = 10.
std::vector<SignQuadrant> observe_quadrants();

/// Relative least-squares fit dev_k ~ C1 lambda^k + C2 sigma^-2k.
struct ScalingFit {
    double C1 = 0.0;
    double C2 = 0.0;
    /// Bound constant: every |dev_k| <= C (lambda^k + sigma^-2k).
    double C = 0.0;
    /// Largest relative misfit |dev - fit| / |dev| over the k-range.
    double residual = 0.0;
    /// Largest misfit relative to |C1| lambda^k + |C2| sigma^-2k.
    double residual_terms = 0.0;
};

ScalingFit fit_scaling(const std::vector<std::size_t>& ks, const std::vector<double>& devs, double lambda,
                       double sigma);

/// Seeded generic draw: sigma in (1.3, 2.5), lambda in (0.1, 0.9 / sigma),
/// coefficients of modulus in (0.5, 2) with random signs (bX2 bY2 < 0), p1, p3 in (-1, 1).
UnfoldingParams random_unfolding_params(std::uint64_t seed);

/// Reproducible per-index stream derived from a base seed.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index);

struct DrawResult {
    std::uint64_t seed = 0;
    UnfoldingParams params;
    std::vector<std::size_t> ks;
    std::vector<double> xi_numeric;
    std::vector<double> xi_exact;
    double oracle_error = 0.0;  ///< max |numeric - exact|
    ScalingFit fit;
    double eigen_u_error = 0.0;  ///< |gamma_u / (b2 sigma^k) - 1| at k_check, worst branch
    double eigen_s_error = 0.0;
    bool ok = false;
};

struct ValidationOptions {
    std::uint64_t seed = 20240917;
    std::size_t draws = 100;
    std::size_t k_min = 6;
    std::size_t k_max = 14;
    std::size_t k_check = 12;
    double oracle_tol = 1e-10;
    double fit_tol = 0.10;
    double eigen_tol = 0.02;
    std::size_t workers = 1;
};

struct ValidationReport {
    std::vector<DrawResult> draws;
    double worst_oracle_error = 0.0;
    double worst_fit_residual = 0.0;
    double worst_eigen_error = 0.0;
    std::size_t passed = 0;
    std::vector<SignQuadrant> predicted_quadrants;
    std::vector<SignQuadrant> observed_quadrants;
    bool quadrants_match = false;

    bool ok() const { return passed == draws.size() && quadrants_match; }
};

DrawResult validate_draw(const UnfoldingParams& u, std::uint64_t seed, const ValidationOptions& options);
ValidationReport run_validation_suite(const ValidationOptions& options);

inline bool operator==(const SignQuadrant& a, const SignQuadrant& b) {
    return a.sign_c2 == b.sign_c2 && a.sign_bX2 == b.sign_bX2 && a.bcb_side == b.bcb_side &&
           a.existence_side == b.existence_side;
}

}  // namespace corner
