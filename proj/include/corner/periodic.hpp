#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corner/normal_form.hpp"
#include "corner/pws_map.hpp"

namespace corner {

enum class Stability { Saddle, Stable, Unstable, NonHyperbolic };

const char* to_string(Stability s);

struct PeriodicOrbit {
    Itinerary itinerary;
    std::vector<PlanarPoint> points;
    double trace = 0.0;
    double det = 0.0;
    std::complex<double> eig_small;
    std::complex<double> eig_large;
    /// Smallest signed distance of points[i] into the region of itinerary[i].
    double margin = 0.0;
    std::size_t margin_index = 0;
    Stability stability = Stability::NonHyperbolic;
    double closure_residual = 0.0;

    std::size_t period() const { return itinerary.size(); }
    double spectral_radius() const { return std::abs(eig_large); }
    bool admissible(double tol = 1e-10) const { return margin >= -tol; }
};

/// Periodic orbit of a piecewise-affine map following `itin`, from the
/// linear fixed-point system of the composed affine map.
/// Throws NoFixedPointError when the composed linear part has eigenvalue 1.
PeriodicOrbit solve_periodic(const PwsMap& map, const Itinerary& itin);

/// Newton solve of f_L(p) = p for maps with nonlinear pieces.
PeriodicOrbit solve_periodic_newton(const PwsMap& map, const Itinerary& itin, PlanarPoint guess,
                                    double tol = 1e-13, int max_iterations = 100);

/// Orbit data (trace, det, margin, ...) for a closure point p0 of `itin`.
PeriodicOrbit orbit_from_point(const PwsMap& map, const Itinerary& itin, PlanarPoint p0);

/// Excursion of the corner orbit: the saddle letter, the letter of the
/// switching crossing on the primary unstable branch (index `split`), then the
/// realized letters until the orbit re-enters the saddle's region.
struct Excursion {
    Itinerary word;
    std::size_t split = 1;
    std::size_t letter_x = 0;  ///< smallest label at the crossing
    std::size_t letter_y = 0;  ///< the other label at the crossing
    PlanarPoint crossing;
    std::size_t saddle_piece = 0;

    std::size_t length() const { return word.size(); }
};

Excursion extract_excursion(const PwsMap& map, const SaddleData& saddle, std::size_t max_steps = 1000,
                            double escape_radius = kDefaultEscapeRadius);

enum class Branch { X, Y };

inline char to_char(Branch b) { return b == Branch::X ? 'X' : 'Y'; }

/// (saddle letter)^k followed by the excursion with the branch letter at `split`.
Itinerary single_round_itinerary(const Excursion& ex, Branch branch, std::size_t k);

struct SingleRoundFamily {
    Excursion excursion;
    Branch branch = Branch::X;
    std::size_t k = 0;
    PeriodicOrbit orbit;
    double bcb_parameter = std::numeric_limits<double>::quiet_NaN();

    std::size_t switch_index() const { return k + excursion.split; }
};

SingleRoundFamily find_single_round(const PwsMap& map, const Excursion& ex, Branch branch, std::size_t k);

using MapFamily = std::function<PwsMap(double)>;

/// Signed margin of orbit point `index` with respect to its own letter.
double point_margin(const PwsMap& map, const PeriodicOrbit& orbit, std::size_t index);

struct BcbOptions {
    /// Explicit bracket; when absent the bracket grows geometrically from seed.
    std::optional<std::pair<double, double>> bracket;
    double seed = 0.0;
    double step = 1e-3;
    int max_expansions = 64;
    double xtol = 1e-12;
    /// Starting point for Newton solves on maps with nonlinear pieces.
    std::optional<PlanarPoint> guess;
};

struct BcbResult {
    double xi = 0.0;
    PeriodicOrbit orbit;
    /// The orbit point that sits on the switching manifold at the bifurcation.
    PlanarPoint switching_point;
    int evaluations = 0;
};

/// Parameter at which orbit point `switch_index` of the periodic orbit with
/// itinerary `itin` reaches the boundary of its region.
BcbResult locate_bcb(const MapFamily& family, const Itinerary& itin, std::size_t switch_index,
                     const BcbOptions& options);

/// q excursions, each preceded by k_i letters near the saddle.
struct MultiRoundSpec {
    std::vector<Branch> branches;
    std::vector<std::size_t> ks;

    std::size_t rounds() const { return ks.size(); }
    friend bool operator==(const MultiRoundSpec&, const MultiRoundSpec&) = default;
};

Itinerary multi_round_itinerary(const Excursion& ex, const MultiRoundSpec& spec);

/// All primitive specs up to cyclic rotation with q <= max_q and period <= max_period.
std::vector<MultiRoundSpec> enumerate_multi_round(std::size_t max_q, std::size_t max_period,
                                                  std::size_t excursion_length);

struct ParameterWindow {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t samples = 11;

    double at(std::size_t i) const {
        return samples <= 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    }
};

struct InstabilityEntry {
    std::string itinerary;
    std::size_t period = 0;
    std::size_t rounds = 0;
    double parameter = 0.0;
    double spectral_radius = 0.0;
    double trace = 0.0;
    double det = 0.0;
    double margin = 0.0;
};

struct InstabilityReport {
    std::vector<InstabilityEntry> admissible;  ///< sorted by period, itinerary, parameter
    std::size_t candidates = 0;
    std::size_t flagged = 0;  ///< admissible orbits with spectral radius <= 1
    std::size_t distinct_itineraries = 0;
};

InstabilityReport scan_periodic_instability(const MapFamily& family, std::size_t saddle_piece, std::size_t max_q,
                                            std::size_t max_period, const ParameterWindow& window,
                                            std::size_t workers = 1);

}  // namespace corner
