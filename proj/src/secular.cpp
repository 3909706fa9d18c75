#include "krein/secular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "krein/common.hpp"

namespace krein {

SecularRoot refine_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
                        double lo, double hi, double tol) {
    SecularRoot out;
    out.lo = lo;
    out.hi = hi;
    const double width0 = hi - lo;
    while (hi - lo > 1e-3 * width0) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fx = f(x);
        if (fx == 0.0) break;
        if (fx > 0.0) lo = x;
        else hi = x;
        const double d = df ? df(x) : 0.0;
        double next = (d < 0.0) ? x - fx / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - x);
        x = next;
        if (step <= tol * std::max(1.0, std::abs(x))) break;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
    }
    out.energy = x;
    out.residual = f(x);
    out.slope = df ? df(x) : 0.0;
    return out;
}

std::vector<SecularRoot> solve_secular(const SecularFunction& phi, Window window, double tol) {
    if (!(window.emin < window.emax)) fail(ErrorCode::InvalidArgument, "empty energy window");
    std::vector<SecularPole> poles;
    for (const auto& p : phi.poles)
        if (!p.node) poles.push_back(p);

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<SecularRoot> roots;
    const std::size_t gaps = poles.size() + 1;
    for (std::size_t g = 0; g < gaps; ++g) {
        const bool bottom = g == 0;
        const double left = bottom ? -inf : poles[g - 1].energy;
        const bool right_is_pole = g < poles.size();
        const double right = right_is_pole ? poles[g].energy : phi.top;
        if (left >= window.emax) break;
        if (!bottom && right <= window.emin) continue;
        if (!(right > left)) continue;

        // Left end: just above a pole, or descend until Phi > 0.
        double a = 0.0;
        if (!bottom) {
            a = left + 2.0 * poles[g - 1].guard;
            if (!(phi.value(a) > 0.0))
                fail(ErrorCode::PoleProximity, "root inside the guard band above E = " + std::to_string(left));
        } else {
            // Descend by doubling down to the window floor.
            const double anchor = std::isfinite(right) ? right : window.emax;
            double step = std::max(1.0, 0.1 * std::abs(anchor));
            bool found = false;
            while (true) {
                a = std::max(anchor - step, window.emin);
                if (phi.value(a) > 0.0) {
                    found = true;
                    break;
                }
                if (a == window.emin) break;
                step *= 2.0;
            }
            if (!found) {
                if (phi.limit_below > 0.0)
                    fail(ErrorCode::WindowTooNarrow,
                         "the lowest root lies below the window floor E = " + std::to_string(window.emin));
                continue;
            }
        }

        // Right end: just below a pole, or sample towards the continuum edge.
        double b = 0.0;
        bool have_b = false;
        if (right_is_pole) {
            b = right - 2.0 * poles[g].guard;
            if (!(phi.value(b) < 0.0))
                fail(ErrorCode::PoleProximity, "root inside the guard band below E = " + std::to_string(right));
            have_b = true;
        } else if (std::isfinite(right)) {
            const double scale = std::max(1.0, std::isfinite(left) ? right - left : 1.0);
            for (int j = 1; j <= 10 && !have_b; ++j) {
                double d = scale * std::pow(10.0, -j);
                if (right - d <= a) continue;
                if (phi.value(right - d) < 0.0) {
                    b = right - d;
                    have_b = true;
                }
            }
        }
        if (!have_b) continue;

        SecularRoot r = refine_root(phi.value, phi.slope, a, b, tol);
        if (!bottom) r.pole_below = poles[g - 1].level;
        if (right_is_pole) r.pole_above = poles[g].level;
        if (r.energy < window.emin) {
            if (bottom)
                fail(ErrorCode::WindowTooNarrow, "lowest root at E = " + std::to_string(r.energy) +
                                                     " lies below the window");
            continue;
        }
        if (r.energy > window.emax) continue;
        roots.push_back(r);
    }
    return roots;
}

}  // namespace krein
