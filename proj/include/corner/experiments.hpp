#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "corner/normal_form.hpp"
#include "corner/periodic.hpp"

namespace corner {

/// Border collisions of the single-round orbits of the normal form as delta_R
/// decreases below a homoclinic corner, with tau_L, delta_L, mu, tau_R fixed.
struct BcbSequenceOptions {
    NormalFormParams base{2.0, 0.75, -0.6, 1.35, 1.0};
    double corner = 1.35;       ///< delta_R of the homoclinic corner
    double lower = 1.0;         ///< far end of every search bracket
    std::size_t n_min = 8;
    std::size_t n_max = 20;
    bool both_branches = true;
    std::size_t workers = 1;
};

struct BcbSequenceEntry {
    std::size_t n = 0;
    Branch branch = Branch::X;
    std::string itinerary;
    bool ok = false;
    std::string error;
    double xi = 0.0;              ///< delta_R at the collision
    double x_on_switching = 0.0;  ///< x of the orbit point next to the switching line
    double trace = 0.0;
    double det = 0.0;
};

struct BcbRatio {
    std::size_t n = 0;
    double ratio = 0.0;
};

struct BcbSequence {
    std::vector<BcbSequenceEntry> entries;  ///< ordered by n, then branch
    std::vector<BcbRatio> ratios;           ///< from the X branch
    /// Least-squares slope of log|delta_n - corner| against n.
    double slope = 0.0;
    bool complete() const;
    /// delta_R values of the X branch, NaN where location failed.
    std::vector<double> values() const;
};

BcbSequence bcb_sequence(const BcbSequenceOptions& options);

/// Both single-round orbits (X and Y branch) of period n at fixed parameters.
std::vector<PeriodicOrbit> single_round_pair(const NormalFormParams& params, std::size_t n);

/// Slope of the least-squares line through (x_i, y_i).
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace corner
