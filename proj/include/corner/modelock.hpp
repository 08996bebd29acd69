#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "corner/normal_form.hpp"
#include "corner/periodic.hpp"

namespace corner {

/// Rigid rotation by m/n coded over {L, R}: letter i is L when
/// (i m mod n) < l. The Sturmian words are the case l = n - m, where letter i
/// is R exactly when floor((i + 1) m / n) > floor(i m / n).
struct RotationalWord {
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t l = 0;  ///< number of L letters
    Itinerary word;
};

/// Sturmian word of rotation number m/n.
RotationalWord rotational_word(std::size_t m, std::size_t n);
RotationalWord rotational_word(std::size_t l, std::size_t m, std::size_t n);
/// Sturmian words for every coprime m/n with 1 <= m < n <= period_cap,
/// ordered by n then m.
std::vector<RotationalWord> enumerate_rotational(std::size_t period_cap);
/// Every rotational word with 1 <= l < n, one per cyclic class (smallest m,
/// then smallest l), ordered by n then m then l.
std::vector<RotationalWord> enumerate_rotational_all(std::size_t period_cap);

struct TongueGrid {
    std::size_t nx = 801;  ///< columns over tau_R
    std::size_t ny = 601;  ///< rows over delta_R
    double tau_min = -1.5, tau_max = 1.5;
    double delta_min = 0.0, delta_max = 1.6;

    double tau(std::size_t i) const {
        return nx <= 1 ? tau_min : tau_min + (tau_max - tau_min) * static_cast<double>(i) / static_cast<double>(nx - 1);
    }
    double delta(std::size_t j) const {
        return ny <= 1 ? delta_min
                       : delta_min + (delta_max - delta_min) * static_cast<double>(j) / static_cast<double>(ny - 1);
    }
};

struct TongueCell {
    std::size_t i = 0;  ///< column (tau_R)
    std::size_t j = 0;  ///< row (delta_R)
    double tau_R = 0.0;
    double delta_R = 0.0;
    std::size_t period = 0;  ///< 0 when no stable rotational orbit was found
    std::size_t m = 0;
    std::size_t l = 0;
    double margin = 0.0;
    double spectral_radius = 0.0;
    PlanarPoint point;  ///< first point of the recorded orbit
};

struct TongueScanOptions {
    TongueGrid grid{};
    double tau_L = 2.0;
    double delta_L = 0.75;
    double mu = 1.0;
    std::size_t period_cap = 30;
    /// Restrict the scan to Sturmian words. The single-round tongues that
    /// accumulate on the codimension-two corner are rotational but not
    /// Sturmian, so the default scans every rotational word.
    bool sturmian_only = false;
    std::size_t workers = 1;
};

std::vector<RotationalWord> scan_words(const TongueScanOptions& options);

/// Stable admissible rotational orbit with the highest period in one cell.
/// Ties keep the first word in list order.
TongueCell classify_cell(const NormalFormParams& params, const std::vector<RotationalWord>& words);

/// Cells in row-major order (j * nx + i).
std::vector<TongueCell> scan_tongues(const TongueScanOptions& options);

struct ConvergenceCheck {
    std::size_t sampled = 0;
    std::size_t converged = 0;
    double fraction() const { return sampled ? static_cast<double>(converged) / static_cast<double>(sampled) : 1.0; }
};

/// Direct simulation from a seeded random perturbation (size `kick`) of the
/// recorded orbit point: converged when, after `transient` iterations, the
/// orbit is within `tol` of the recorded orbit.
bool converges_to_recorded(const NormalFormParams& params, const TongueCell& cell, PlanarPoint start,
                           std::size_t transient, double tol);

ConvergenceCheck check_convergence(const TongueScanOptions& options, const std::vector<TongueCell>& cells,
                                   std::size_t samples, std::uint64_t seed, std::size_t transient = 1000,
                                   double kick = 1e-3, double tol = 1e-6);

/// Tongue cells inside nested discs around a target point.
struct Accumulation {
    std::vector<double> radii;               ///< decreasing
    std::vector<std::size_t> cells;          ///< tongue cells in each disc
    std::vector<std::size_t> min_period;     ///< 0 for an empty disc
    /// Every disc is occupied and the smallest period grows strictly as the
    /// discs shrink.
    bool accumulates() const;
};

Accumulation tongue_accumulation(const std::vector<TongueCell>& cells, PlanarPoint target,
                                 const std::vector<double>& radii);

}  // namespace corner
