#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corner/modelock.hpp"
#include "corner/normal_form.hpp"
#include "corner/pws_map.hpp"
#include "corner/unfolding.hpp"

namespace corner {

/// A map as written in a config file: the border-collision normal form, its
/// reduced X/Y form, or an explicit table of polynomial pieces.
struct MapSpec {
    std::string kind = "bcnf";  ///< bcnf | reduced | polynomial
    NormalFormParams normal{2.0, 0.75, -0.6, 1.35, 1.0};
    ReducedNormalFormParams reduced{};
    double xi = 0.0;  ///< offset of the reduced form
    std::vector<Piece> pieces;
    std::vector<Poly2> switching;
    std::vector<std::vector<Constraint>> regions;

    friend bool operator==(const MapSpec&, const MapSpec&) = default;
};

PwsMap build_map(const MapSpec& spec);

struct Window {
    double xmin = -6.0, xmax = 4.0, ymin = -4.0, ymax = 5.0;
    friend bool operator==(const Window&, const Window&) = default;
};

struct IterateBlock {
    PlanarPoint start{0.0, 0.0};
    std::size_t iterations = 10000;
    std::size_t transient = 1000;
    double escape_radius = kDefaultEscapeRadius;
    friend bool operator==(const IterateBlock&, const IterateBlock&) = default;
};

struct PortraitBlock {
    bool manifolds = true;
    std::size_t max_generations = 60;
    std::size_t max_vertices = 200000;
    double max_arclength = 100.0;
    /// Period of the single-round pair to overlay; 0 for none.
    std::size_t single_round_period = 0;
    /// Piece whose saddle carries the manifolds; unset picks the first saddle.
    std::optional<std::size_t> saddle_piece;
    bool certificate = false;
    Window window{};
    friend bool operator==(const PortraitBlock&, const PortraitBlock&) = default;
};

struct BifdiagBlock {
    std::optional<double> corner;  ///< located inside corner_bracket when unset
    std::pair<double, double> corner_bracket{1.25, 1.45};
    double lower = 1.0;
    std::size_t n_min = 8;
    std::size_t n_max = 20;
    friend bool operator==(const BifdiagBlock&, const BifdiagBlock&) = default;
};

struct ContinuationBlock {
    double step = 0.02;
    std::pair<double, double> span{-1.2, 0.0};
    double window = 0.05;
    friend bool operator==(const ContinuationBlock&, const ContinuationBlock&) = default;
};

struct CornerBlock {
    std::pair<double, double> bracket{1.25, 1.45};
    bool trace = false;
    ContinuationBlock continuation{};
    friend bool operator==(const CornerBlock&, const CornerBlock&) = default;
};

struct GridBlock {
    std::size_t nx = 801, ny = 601;
    double tau_min = -1.5, tau_max = 1.5;
    double delta_min = 0.0, delta_max = 1.6;
    friend bool operator==(const GridBlock&, const GridBlock&) = default;
};

struct SweepBlock {
    GridBlock grid{};
    std::size_t period_cap = 30;
    bool sturmian_only = false;
    /// Seeds (tau_R, delta_R) of the corner curves to trace.
    std::vector<std::pair<double, double>> corner_seeds{{-0.6, 1.35}};
    ContinuationBlock continuation{};
    friend bool operator==(const SweepBlock&, const SweepBlock&) = default;
};

struct TonguesBlock {
    GridBlock grid{};
    std::size_t period_cap = 30;
    bool sturmian_only = false;
    std::size_t samples = 2000;
    std::size_t transient = 1000;
    double kick = 1e-3;
    double tol = 1e-6;
    PlanarPoint target{-0.5, 1.5};
    std::vector<double> radii{0.4, 0.2, 0.1, 0.05, 0.025, 0.0125};
    friend bool operator==(const TonguesBlock&, const TonguesBlock&) = default;
};

struct ValidateBlock {
    std::size_t draws = 100;
    std::size_t k_min = 6;
    std::size_t k_max = 14;
    std::size_t k_check = 12;
    double oracle_tol = 1e-10;
    double fit_tol = 0.10;
    double eigen_tol = 0.02;
    /// Explicit parameter sets; when non-empty they replace the random draws.
    std::vector<UnfoldingParams> params;
    friend bool operator==(const ValidateBlock&, const ValidateBlock&) = default;
};

struct TentBlock {
    SkewTentParams params{1.5, -1.5, 1.0};
    double x0 = 0.0;
    std::size_t iterations = 100;
    friend bool operator==(const TentBlock&, const TentBlock&) = default;
};

struct ExperimentConfig {
    int version = 1;
    std::uint64_t seed = 20240917;
    std::size_t workers = 0;  ///< 0 means all available cores
    std::string output_dir = "out";
    MapSpec map{};
    IterateBlock iterate{};
    PortraitBlock portrait{};
    BifdiagBlock bifdiag{};
    CornerBlock corner{};
    SweepBlock sweep{};
    TonguesBlock tongues{};
    ValidateBlock validate{};
    TentBlock tent{};
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Strict parse: unknown fields and wrong types raise ConfigError naming the
/// field path (and the line for syntax errors). Missing fields keep defaults.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);
/// Every field, in a fixed order; parse(serialise(c)) == c.
std::string serialise_config(const ExperimentConfig& config);

}  // namespace corner
