#include "krein/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "krein/common.hpp"

namespace krein::special {
namespace {

constexpr double kSeriesEps = 1e-17;

void require_positive(double x, const char* name) {
    if (!(x > 0.0)) throw std::domain_error(std::string(name) + ": argument must be positive");
}

// sum_{k>=1} (x^2/4)^k H_k / (k!)^2
double k0_harmonic_series(double x) {
    const double z = 0.25 * x * x;
    double term = 1.0;
    double harmonic = 0.0;
    double sum = 0.0;
    for (int k = 1; k < 200; ++k) {
        term *= z / (double(k) * double(k));
        harmonic += 1.0 / k;
        const double add = term * harmonic;
        sum += add;
        if (add < kSeriesEps * std::abs(sum)) break;
    }
    return sum;
}

// exp(x) * int_0^inf exp(-x cosh t) cosh(nu t) dt by the trapezoid rule.
double integral_scaled(double x, int nu) {
    const double h = 0.0625;
    const double tmax = std::acosh(1.0 + 45.0 / x);
    double sum = 0.5;  // t = 0 term, exp(-x (cosh 0 - 1)) = 1
    for (int j = 1;; ++j) {
        const double t = j * h;
        if (t > tmax) break;
        const double c = std::cosh(t);
        sum += std::exp(-x * (c - 1.0)) * (nu == 0 ? 1.0 : c);
    }
    return h * sum;
}

// exp(x) * K_nu(x) from the large-argument expansion.
double asymptotic_scaled(double x, int nu) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(term) > prev) break;
        sum += term;
        prev = std::abs(term);
        if (prev < kSeriesEps * std::abs(sum)) break;
    }
    return std::sqrt(kPi / (2.0 * x)) * sum;
}

}  // namespace

double bessel_i0(double x) {
    const double z = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= z / (double(k) * double(k));
        sum += term;
        if (term < kSeriesEps * sum) break;
    }
    return sum;
}

double bessel_i1(double x) {
    const double z = 0.25 * x * x;
    double term = 0.5 * x;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= z / (double(k) * double(k + 1));
        sum += term;
        if (std::abs(term) < kSeriesEps * std::abs(sum)) break;
    }
    return sum;
}

double bessel_k0_regular(double x) {
    if (x < 0.0) throw std::domain_error("bessel_k0_regular: negative argument");
    return k0_harmonic_series(x);
}

double bessel_k0(double x) {
    require_positive(x, "bessel_k0");
    if (x < 2.0) return -(std::log(0.5 * x) + kEulerGamma) * bessel_i0(x) + k0_harmonic_series(x);
    return std::exp(-x) * bessel_k0_scaled(x);
}

double bessel_k0_scaled(double x) {
    require_positive(x, "bessel_k0_scaled");
    if (x < 2.0) return std::exp(x) * bessel_k0(x);
    if (x < 20.0) return integral_scaled(x, 0);
    return asymptotic_scaled(x, 0);
}

double bessel_k1(double x) {
    require_positive(x, "bessel_k1");
    if (x < 2.0) {
        // K1 = 1/x + ln(x/2) I1 - (x/4) sum (psi(k+1) + psi(k+2)) (x^2/4)^k / (k! (k+1)!)
        const double z = 0.25 * x * x;
        double term = 1.0;
        double psi1 = -kEulerGamma;        // psi(1)
        double psi2 = 1.0 - kEulerGamma;   // psi(2)
        double sum = term * (psi1 + psi2);
        for (int k = 1; k < 200; ++k) {
            term *= z / (double(k) * double(k + 1));
            psi1 += 1.0 / k;
            psi2 += 1.0 / (k + 1);
            const double add = term * (psi1 + psi2);
            sum += add;
            if (std::abs(add) < kSeriesEps * std::abs(sum)) break;
        }
        return 1.0 / x + std::log(0.5 * x) * bessel_i1(x) - 0.25 * x * sum;
    }
    return std::exp(-x) * bessel_k1_scaled(x);
}

double bessel_k1_scaled(double x) {
    require_positive(x, "bessel_k1_scaled");
    if (x < 2.0) return std::exp(x) * bessel_k1(x);
    if (x < 20.0) return integral_scaled(x, 1);
    return asymptotic_scaled(x, 1);
}

}  // namespace krein::special
