#pragma once

#include <functional>
#include <utility>

namespace corner {

struct RootResult {
    double root = 0.0;
    double value = 0.0;
    int evaluations = 0;
};

/// Bracketing root finder mixing bisection with secant and inverse
/// quadratic steps (Brent). Requires f(a) and f(b) of opposite sign (or zero);
/// otherwise throws BracketError. Stops once the bracket is narrower than xtol.
RootResult find_root(const std::function<double(double)>& f, double a, double b, double xtol = 1e-12,
                     int max_evaluations = 400);

/// Grows [seed, seed + step] geometrically, alternating sides, until f changes
/// sign. Throws BracketError after max_expansions doublings.
std::pair<double, double> expand_bracket(const std::function<double(double)>& f, double seed, double step,
                                         int max_expansions = 64);

}  // namespace corner
