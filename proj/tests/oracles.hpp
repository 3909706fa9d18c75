#pragma once

// Independent reference values for the tests. Nothing here calls into the library.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

// Free line: G0(x,y|E) = exp(-q|x-y|) / (2 c q), q = sqrt(-E/c).
inline double free_line_kernel(double x, double y, double E, double c = 1.0) {
    const double q = std::sqrt(-E / c);
    return std::exp(-q * std::abs(x - y)) / (2.0 * c * q);
}

// Oscillator diagonal at the origin: sum_n |phi_n(0)|^2 / (E_n - E)
// = (s / hw) Gamma(b) / (2 Gamma(b + 1/2)), b = (1/2 - E/hw) / 2, s = sqrt(m omega / hbar).
inline double oscillator_origin_diagonal(double E, double hbar, double mass, double omega) {
    const double hw = hbar * omega;
    const double s = std::sqrt(mass * omega / hbar);
    const double b = 0.5 * (0.5 - E / hw);
    return s / hw * std::tgamma(b) / (2.0 * std::tgamma(b + 0.5));
}

// Oscillator G0(x, y | E) for E below the ground level from the Mehler heat kernel,
// int_0^inf e^{E t / hbar} K_t(x, y) dt / hbar, with t = w^2 and composite Simpson.
inline double oscillator_mehler(double x, double y, double E, double hbar, double mass, double omega);

// Free-plane kernel K0(q r) / (2 pi c) and its circle average I0(qR) K0(qR) / (2 pi c).
inline double plane_kernel(double r, double E, double c = 1.0) {
    const double q = std::sqrt(-E / c);
    return std::cyl_bessel_k(0.0, q * r) / (2.0 * pi * c);
}
inline double circle_average_diagonal(double R, double E, double c = 1.0) {
    const double q = std::sqrt(-E / c);
    return std::cyl_bessel_i(0.0, q * R) * std::cyl_bessel_k(0.0, q * R) / (2.0 * pi * c);
}
// Average over a circle of radius R of the kernel from a point at distance d > R from its centre.
inline double circle_average_far(double R, double d, double E, double c = 1.0) {
    const double q = std::sqrt(-E / c);
    return std::cyl_bessel_i(0.0, q * R) * std::cyl_bessel_k(0.0, q * d) / (2.0 * pi * c);
}

template <class F>
double bisect(F f, double lo, double hi, int iters = 200) {
    const bool neg_lo = f(lo) < 0.0;
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((f(mid) < 0.0) == neg_lo)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Two equal centres a distance D apart on the free line: even and odd levels from
// 2 c q / alpha = 1 +- exp(-q D). Sorted ascending; the odd one exists iff alpha D > 2c.
inline std::vector<double> double_well(double alpha, double D, double c = 1.0) {
    std::vector<double> out;
    const double qmax = alpha / c + 1.0;
    const double qe = bisect([&](double q) { return 2.0 * c * q / alpha - 1.0 - std::exp(-q * D); }, 0.0, qmax);
    out.push_back(-c * qe * qe);
    if (alpha * D > 2.0 * c) {
        const double q0 = std::log(alpha * D / (2.0 * c)) / D;
        const double qo = bisect([&](double q) { return 2.0 * c * q / alpha - 1.0 + std::exp(-q * D); }, q0, qmax);
        out.push_back(-c * qo * qo);
    }
    return out;
}

// Free-line delta of strength alpha: eta = e^{ikx} + beta e^{ik|x-a|}.
inline Complex free_line_beta(double k, double alpha, double c = 1.0) {
    const Complex g(0.0, 1.0 / (2.0 * c * std::abs(k)));
    return g / (1.0 / alpha - g);
}

// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

inline double oscillator_mehler(double x, double y, double E, double hbar, double mass, double omega) {
    const double s = std::sqrt(mass * omega / hbar);
    const double xi = s * x;
    const double eta = s * y;
    const double eps = E / (hbar * omega);
    auto f = [&](double w) {
        if (w == 0.0) return xi == eta ? 2.0 / std::sqrt(2.0 * pi) : 0.0;
        const double t = w * w;
        // sinh and cosh scaled by e^{-t} to survive large t.
        const double e1 = std::exp(-t);
        const double sh = 1.0 - e1 * e1;
        const double expo = ((xi * xi + eta * eta) * (1.0 + e1 * e1) - 4.0 * xi * eta * e1) / (2.0 * sh);
        return 2.0 * w * std::exp((eps - 0.5) * t - expo) / std::sqrt(pi * sh);
    };
    const double wmax = std::sqrt(60.0 / (0.5 - eps));
    return s / (hbar * omega) * simpson(f, 0.0, wmax, 200000);
}

// Seeded uniform draws in [lo, hi).
class Draws {
public:
    explicit Draws(std::uint64_t seed) : gen_(seed) {}
    double operator()(double lo, double hi) { return lo + (hi - lo) * (double(gen_() >> 11) * 0x1.0p-53); }

private:
    std::mt19937_64 gen_;
};

// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= double(x.size());
    my /= double(x.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

// Flat torus, level n = 0 at E_0 = 0, any support point (|phi_n|^2 = 1/A):
// sum_{n != 0} (1/A) mu2 / (E_n (E_n + mu2)) by lattice shells up to Lambda plus the Weyl tail
// (1 / (4 pi c)) ln((Lambda + mu2) / Lambda).
inline double torus_ground_subtracted(double L1, double L2, double c, double mu2, double Lambda) {
    const double A = L1 * L2;
    const double k1 = 2 * pi / L1;
    const double k2 = 2 * pi / L2;
    const int n1max = int(std::sqrt(Lambda / c) / k1) + 1;
    const int n2max = int(std::sqrt(Lambda / c) / k2) + 1;
    double s = 0.0;
    for (int n1 = -n1max; n1 <= n1max; ++n1)
        for (int n2 = -n2max; n2 <= n2max; ++n2) {
            const double E = c * (k1 * k1 * n1 * n1 + k2 * k2 * n2 * n2);
            if (E == 0.0 || E > Lambda) continue;
            s += mu2 / (E * (E + mu2)) / A;
        }
    return s + std::log((Lambda + mu2) / Lambda) / (4 * pi * c);
}

}  // namespace oracle
