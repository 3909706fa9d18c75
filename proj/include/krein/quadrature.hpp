#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <utility>
#include <vector>

namespace krein::quad {

template <class T>
struct Result {
    T value{};
    double error = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
};

// Gauss-Legendre nodes and weights on [-1, 1]. Thread-safe cache.
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const Rule& gauss_legendre(std::size_t n);

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Panel {
    double a;
    double b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace detail

// One 15-point Gauss-Kronrod panel; the error is |K15 - G7|.
template <class F>
auto gauss_kronrod15(F&& f, double a, double b) {
    using T = decltype(f(a));
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const T fc = f(center);
    T kronrod = fc * detail::kWgk[7];
    T gauss = fc * detail::kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * detail::kXgk[j];
        const T sum = f(center - dx) + f(center + dx);
        kronrod += sum * detail::kWgk[j];
        if (j % 2 == 1) gauss += sum * detail::kWg[j / 2];
    }
    Result<T> r;
    r.value = kronrod * half;
    r.error = detail::magnitude((kronrod - gauss) * half);
    r.evaluations = 15;
    return r;
}

// Globally adaptive Gauss-Kronrod over [a, b] split at the given breakpoints.
// Stops when the summed error estimate is below max(abs_tol, rel_tol * |I|).
template <class F>
auto integrate(F&& f, std::vector<double> breaks, double abs_tol, double rel_tol,
               std::size_t max_panels = 20000) {
    using T = decltype(f(0.0));
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::priority_queue<detail::Panel<T>> heap;
    Result<T> total;
    T value{};
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        auto r = gauss_kronrod15(f, breaks[i], breaks[i + 1]);
        total.evaluations += r.evaluations;
        value += r.value;
        error += r.error;
        heap.push({breaks[i], breaks[i + 1], r.value, r.error});
    }
    while (!heap.empty() && error > std::max(abs_tol, rel_tol * detail::magnitude(value))) {
        if (heap.size() >= max_panels) {
            total.converged = false;
            break;
        }
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            total.converged = false;
            heap.push(worst);
            break;
        }
        auto left = gauss_kronrod15(f, worst.a, mid);
        auto right = gauss_kronrod15(f, mid, worst.b);
        total.evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push({worst.a, mid, left.value, left.error});
        heap.push({mid, worst.b, right.value, right.error});
    }
    // Re-sum to limit accumulated rounding of the running totals.
    value = T{};
    error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    total.value = value;
    total.error = error;
    return total;
}

template <class F>
auto integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
               std::size_t max_panels = 20000) {
    return integrate(std::forward<F>(f), std::vector<double>{a, b}, abs_tol, rel_tol, max_panels);
}

// Integral over [a, inf) through t = a + s / (1 - s).
template <class F>
auto integrate_to_infinity(F&& f, double a, double abs_tol, double rel_tol) {
    using T = decltype(f(a));
    auto g = [&](double s) -> T {
        if (s >= 1.0) return T{};
        const double om = 1.0 - s;
        return f(a + s / om) * (1.0 / (om * om));
    };
    return integrate(g, 0.0, 1.0, abs_tol, rel_tol);
}

// Fixed-order Gauss-Legendre on [a, b].
template <class F>
auto gauss_fixed(F&& f, double a, double b, std::size_t n) {
    using T = decltype(f(a));
    const Rule& rule = gauss_legendre(n);
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T sum{};
    for (std::size_t i = 0; i < n; ++i) sum += f(c + h * rule.nodes[i]) * rule.weights[i];
    return sum * h;
}

}  // namespace krein::quad
