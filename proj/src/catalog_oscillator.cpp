#include <algorithm>
#include <cmath>

#include "krein/catalog.hpp"
#include "krein/quadrature.hpp"

namespace krein {
namespace {

// sum_n h_n(xi) h_n(eta) / (n + 1/2 - eps_r)^{j+1} for j = 0, 1, 2 from the Mehler kernel:
// int_0^inf tau^j / j! e^{eps_r tau} K_tau(xi, eta) dtau, eps_r < 1/2, with tau = u^2.
struct Moments {
    double value[3];
    double error;
};

Moments mehler_moments(double xi, double eta, double eps_r) {
    const double dxi = xi - eta;
    const double decay = 0.5 - eps_r;
    const double umax = std::sqrt(80.0 / decay);
    Moments out{{0.0, 0.0, 0.0}, 0.0};
    for (int j = 0; j < 3; ++j) {
        auto f = [&](double u) {
            if (u == 0.0) return dxi == 0.0 && j == 0 ? 2.0 / std::sqrt(2.0 * kPi) : 0.0;
            const double tau = u * u;
            const double em = std::exp(-2.0 * tau);
            // e^{eps_r tau} / sqrt(2 pi sinh tau) without overflow.
            const double front = std::exp(-decay * tau) / std::sqrt(kPi * -std::expm1(-2.0 * tau));
            const double expo = dxi * dxi * (1.0 + em) / (2.0 * -std::expm1(-2.0 * tau)) + xi * eta * std::tanh(0.5 * tau);
            const double pw = j == 0 ? 1.0 : (j == 1 ? tau : 0.5 * tau * tau);
            return 2.0 * u * pw * front * std::exp(-expo);
        };
        std::vector<double> breaks{0.0};
        const double scale = std::max(std::abs(dxi), 1e-3);
        for (double b = scale / 8.0; b < umax; b *= 2.0) breaks.push_back(b);
        breaks.push_back(umax);
        const auto r = quad::integrate(f, breaks, 1e-17, 1e-15);
        out.value[j] = r.value;
        out.error += r.error;
    }
    return out;
}

}  // namespace

HarmonicOscillator::HarmonicOscillator(double omega, Units units) : BaseProblem(units), omega_(omega) {
    if (!(units.hbar > 0.0) || !(units.mass > 0.0))
        fail(ErrorCode::InvalidArgument, "hbar and mass must be positive");
    if (!(omega > 0.0) || !std::isfinite(omega))
        fail(ErrorCode::InvalidArgument, "harmonic: omega must be positive");
    scale_ = std::sqrt(units.mass * omega / units.hbar);
}

double HarmonicOscillator::mode_energy(std::size_t n) const {
    return units_.hbar * omega_ * (double(n) + 0.5);
}

void HarmonicOscillator::hermite_functions(double xi, std::vector<double>& out) {
    if (out.empty()) return;
    out[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * xi * xi);
    if (out.size() > 1) out[1] = std::sqrt(2.0) * xi * out[0];
    for (std::size_t n = 1; n + 1 < out.size(); ++n) {
        const double a = std::sqrt(2.0 / double(n + 1));
        const double b = std::sqrt(double(n) / double(n + 1));
        out[n + 1] = a * xi * out[n] - b * out[n - 1];
    }
}

Complex HarmonicOscillator::mode_value(std::size_t n, Point x) const {
    if (n >= kCapacity) fail(ErrorCode::OutOfRange, "harmonic: mode index too large");
    std::vector<double> h(n + 1);
    hermite_functions(scale_ * x.x, h);
    return std::sqrt(scale_) * h[n];
}

void HarmonicOscillator::mode_values(Point x, std::vector<Complex>& out) const {
    std::vector<double> h(out.size());
    hermite_functions(scale_ * x.x, h);
    const double s = std::sqrt(scale_);
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = s * h[n];
}

double HarmonicOscillator::mode_peak_density(std::size_t n) const {
    // |h_n|^2 lives on |xi| <= sqrt(2n+1); sample past the turning point.
    const double edge = std::sqrt(2.0 * n + 1.0) + 3.0;
    const int samples = 400;
    std::vector<double> h(n + 1);
    double peak = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double xi = -edge + 2.0 * edge * i / samples;
        hermite_functions(xi, h);
        peak = std::max(peak, h[n] * h[n]);
    }
    return scale_ * peak;
}

EnergyLevel HarmonicOscillator::level(std::size_t k) const {
    if (k >= kCapacity) fail(ErrorCode::OutOfRange, "harmonic: level index too large");
    return EnergyLevel{k, mode_energy(k), k, 1};
}

Complex HarmonicOscillator::partial_sum(Point x, Point y, Complex E, int power, std::size_t count,
                                        std::optional<std::size_t> skip_level) const {
    std::vector<double> hx(count);
    std::vector<double> hy(count);
    hermite_functions(scale_ * x.x, hx);
    hermite_functions(scale_ * y.x, hy);
    Complex sum{};
    for (std::size_t n = 0; n < count; ++n) {
        if (skip_level && *skip_level == n) continue;
        const Complex d = mode_energy(n) - E;
        sum += hx[n] * hy[n] / (power == 1 ? d : d * d);
    }
    return scale_ * sum;
}

SeriesValue HarmonicOscillator::discrete_sum(Point x, Point y, Complex E, int power,
                                             std::optional<std::size_t> skip_level, double) const {
    if (power != 1 && power != 2) fail(ErrorCode::InvalidArgument, "harmonic: power must be 1 or 2");
    const double hw = units_.hbar * omega_;
    const double xi_x = scale_ * x.x;
    const double xi_y = scale_ * y.x;
    const double xi2 = std::max(xi_x * xi_x, xi_y * xi_y);
    const Complex eps = E / hw;
    const double base = std::max(1024.0, 8.0 * (xi2 + 2.0 * std::abs(eps)) + 64.0);
    const std::size_t n0 = std::size_t(base);
    const std::size_t counts[3] = {n0, 4 * n0, 16 * n0};

    return subtracted_sum(xi_x, xi_y, E, power, skip_level, counts);
}

// The plain series converges slowly (diagonal) or only conditionally (off-diagonal).
// Expanding about a reference energy E_r below the spectrum moves the leading terms into
// Mehler moments and leaves a remainder decaying like n^{-7/2}.
SeriesValue HarmonicOscillator::subtracted_sum(double xi_x, double xi_y, Complex E, int power,
                                               std::optional<std::size_t> skip_level,
                                               const std::size_t (&counts)[3]) const {
    const double hw = units_.hbar * omega_;
    const Complex eps = E / hw;
    const double eps_r = std::min(eps.real(), 0.0) - 1.0;
    const Complex delta = eps - eps_r;
    Moments m = mehler_moments(xi_x, xi_y, eps_r);

    std::vector<double> hx(counts[2]);
    std::vector<double> hy(counts[2]);
    hermite_functions(xi_x, hx);
    hermite_functions(xi_y, hy);
    if (skip_level && *skip_level < counts[2]) {
        const double num = hx[*skip_level] * hy[*skip_level];
        const double a = double(*skip_level) + 0.5 - eps_r;
        for (int j = 0; j < 3; ++j) m.value[j] -= num / std::pow(a, j + 1);
    }
    Complex partial[3];
    Complex sum{};
    std::size_t stage = 0;
    for (std::size_t n = 0; n < counts[2]; ++n) {
        if (!(skip_level && *skip_level == n)) {
            const double num = hx[n] * hy[n];
            if (num != 0.0) {
                const double a = double(n) + 0.5 - eps_r;
                const Complex d = a - delta;
                // 1/d - 1/a - delta/a^2 and 1/d^2 - 1/a^2 - 2 delta/a^3 in closed form.
                sum += power == 1 ? num / (d * a * a) : num * (3.0 * a - 2.0 * delta) / (a * a * a * d * d);
            }
        }
        if (n + 1 == counts[stage]) partial[stage++] = sum;
    }
    const Complex d2 = delta * delta;
    const Complex lead = power == 1 ? m.value[0] + delta * m.value[1] : m.value[1] + 2.0 * delta * m.value[2];
    const double unit = scale_ / std::pow(hw, power);
    SeriesValue out;
    out.terms = counts[2];
    out.value = unit * (lead + d2 * partial[2]);
    out.error = unit * (std::abs(d2) * std::abs(partial[2] - partial[1]) + (1.0 + 2.0 * std::abs(delta)) * m.error) +
                1e-15 * std::abs(out.value);
    return out;
}

}  // namespace krein
