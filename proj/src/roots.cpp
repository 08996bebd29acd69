#include "corner/roots.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "corner/errors.hpp"

namespace corner {

RootResult find_root(const std::function<double(double)>& f, double a, double b, double xtol,
                     int max_evaluations) {
    double fa = f(a);
    double fb = f(b);
    int evals = 2;
    if (fa == 0.0) return {a, fa, evals};
    if (fb == 0.0) return {b, fb, evals};
    if (!std::isfinite(fa) || !std::isfinite(fb) || (fa > 0.0) == (fb > 0.0)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "no sign change over bracket [" << a << ", " << b << "] (f = " << fa << ", " << fb << ")";
        throw BracketError(msg.str());
    }
    double c = a, fc = fa;
    double d = b - a, e = d;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    while (evals < max_evaluations) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * eps * std::abs(b) + 0.5 * xtol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return {b, fb, evals};
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = e = m;
        } else {
            double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc, r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = e = m;
            }
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        ++evals;
        if (!std::isfinite(fb)) throw BracketError("root function returned a non-finite value");
    }
    return {b, fb, evals};
}

std::pair<double, double> expand_bracket(const std::function<double(double)>& f, double seed, double step,
                                         int max_expansions) {
    if (step == 0.0) throw BracketError("bracket expansion needs a nonzero step");
    const double f0 = f(seed);
    if (f0 == 0.0) return {seed, seed};
    double lo = seed, hi = seed;
    double h = std::abs(step);
    // First direction follows the sign of step.
    const double dir = step > 0.0 ? 1.0 : -1.0;
    for (int i = 0; i < max_expansions; ++i) {
        for (double sgn : {dir, -dir}) {
            const double x = seed + sgn * h;
            double fx;
            try {
                fx = f(x);
            } catch (const Error&) {
                continue;
            }
            if (std::isfinite(fx) && (fx > 0.0) != (f0 > 0.0)) {
                // Tighten to the last sample on the same side.
                const double inner = seed + sgn * h * 0.5;
                double fi = f0;
                try { fi = f(inner); } catch (const Error&) { fi = f0; }
                if (i > 0 && std::isfinite(fi) && (fi > 0.0) == (f0 > 0.0)) {
                    lo = std::min(inner, x);
                    hi = std::max(inner, x);
                } else {
                    lo = std::min(seed, x);
                    hi = std::max(seed, x);
                }
                return {lo, hi};
            }
        }
        h *= 2.0;
    }
    std::ostringstream msg;
    msg << "no sign change found after " << max_expansions << " bracket expansions from " << seed;
    throw BracketError(msg.str());
}

}  // namespace corner
