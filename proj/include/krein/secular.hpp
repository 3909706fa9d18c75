#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace krein {

struct Window {
    double emin = -10.0;
    double emax = 0.0;
};

// A level of H0 as seen by a scalar secular function: a pole unless it is a node.
struct SecularPole {
    double energy = 0.0;
    std::size_t level = 0;
    bool node = false;
    double guard = 0.0;  // half-width of the excluded band
};

// Phi(E), strictly decreasing between consecutive poles, +inf just above a pole
// and -inf just below it.
struct SecularFunction {
    std::function<double(double)> value;
    std::function<double(double)> slope;
    std::vector<SecularPole> poles;  // sorted; must include the first level above emax
    double top = 0.0;                // continuum infimum, or +inf
    double limit_below = 0.0;        // sign of Phi as E -> -inf (a root exists below the first pole iff > 0)
};

struct SecularRoot {
    double energy = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double residual = 0.0;
    double slope = 0.0;
    std::optional<std::size_t> pole_below;  // level index of the gap's lower pole
    std::optional<std::size_t> pole_above;  // level index of the gap's upper pole
};

// Root of f on [lo, hi] with f(lo) > 0 > f(hi): bisection to 1e-3 of the bracket,
// then Newton safeguarded by the bracket. Converged when |dE| <= tol max(1, |E|).
SecularRoot refine_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
                        double lo, double hi, double tol);

// All roots in the window, one per gap at most.
// Throws WindowTooNarrow when the lowest root lies below window.emin.
std::vector<SecularRoot> solve_secular(const SecularFunction& phi, Window window, double tol);

}  // namespace krein
