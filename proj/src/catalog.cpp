#include <cmath>

#include "krein/catalog.hpp"
#include "krein/special.hpp"

namespace krein {
namespace {

void validate_units(const Units& u) {
    if (!(u.hbar > 0.0) || !(u.mass > 0.0) || !std::isfinite(u.hbar) || !std::isfinite(u.mass))
        fail(ErrorCode::InvalidArgument, "hbar and mass must be positive");
}

[[noreturn]] void no_modes(const std::string& label, std::size_t n) {
    fail(ErrorCode::OutOfRange, label + " has no discrete mode " + std::to_string(n));
}

// q on the cut: G(E + i0) uses q = -ik, G(E - i0) uses q = +ik.
Complex boundary_q(double E, double c, Side side) {
    if (E <= 0.0) return Complex(std::sqrt(-E / c), 0.0);
    const double k = std::sqrt(E / c);
    return side == Side::Plus ? Complex(0.0, -k) : Complex(0.0, k);
}

}  // namespace

Complex PlaneWaveChannel::eigenfunction(double k, Point x) const {
    return std::exp(Complex(0.0, k * x.x));
}

Complex ReflectionlessChannel::eigenfunction(double k, Point x) const {
    const Complex ik(0.0, k);
    return std::exp(ik * x.x) * (ik - kappa_ * std::tanh(kappa_ * x.x)) / (kappa_ + ik);
}

// ---- free line ----

FreeLine::FreeLine(Units units) : BaseProblem(units) {
    validate_units(units);
    channels_.push_back(std::make_shared<PlaneWaveChannel>(kinetic()));
}

double FreeLine::mode_energy(std::size_t n) const { no_modes(label(), n); }
Complex FreeLine::mode_value(std::size_t n, Point) const { no_modes(label(), n); }
double FreeLine::mode_peak_density(std::size_t n) const { no_modes(label(), n); }

Complex FreeLine::closed_green(Point x, Point y, Complex E) const {
    const double c = kinetic();
    const Complex q = decay_rate(E, c);
    return std::exp(-q * std::abs(x.x - y.x)) / (2.0 * c * q);
}

Complex FreeLine::closed_green_boundary(Point x, Point y, double E, Side side) const {
    const double c = kinetic();
    const Complex q = boundary_q(E, c, side);
    return std::exp(-q * std::abs(x.x - y.x)) / (2.0 * c * q);
}

Complex FreeLine::closed_green_derivative(Point x, Point y, Complex E) const {
    const double c = kinetic();
    const Complex q = decay_rate(E, c);
    const double d = std::abs(x.x - y.x);
    return std::exp(-q * d) * (q * d + 1.0) / (4.0 * c * c * q * q * q);
}

// ---- reflectionless ----

Reflectionless::Reflectionless(double kappa, Units units) : BaseProblem(units), kappa_(kappa) {
    validate_units(units);
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        fail(ErrorCode::InvalidArgument, "reflectionless: kappa must be positive");
    channels_.push_back(std::make_shared<ReflectionlessChannel>(kappa, kinetic()));
    build_levels();
}

double Reflectionless::mode_energy(std::size_t n) const {
    if (n != 0) no_modes(label(), n);
    return -kinetic() * kappa_ * kappa_;
}

Complex Reflectionless::mode_value(std::size_t n, Point x) const {
    if (n != 0) no_modes(label(), n);
    return std::sqrt(0.5 * kappa_) / std::cosh(kappa_ * x.x);
}

double Reflectionless::mode_peak_density(std::size_t n) const {
    if (n != 0) no_modes(label(), n);
    return 0.5 * kappa_;
}

Complex Reflectionless::green_from_q(double x, double y, Complex q) const {
    const double c = kinetic();
    const double lo = std::tanh(kappa_ * std::min(x, y));
    const double hi = std::tanh(kappa_ * std::max(x, y));
    const Complex num = std::exp(-q * std::abs(x - y)) * (q - kappa_ * lo) * (q + kappa_ * hi);
    return num / (2.0 * c * q * (q * q - kappa_ * kappa_));
}

Complex Reflectionless::closed_green(Point x, Point y, Complex E) const {
    return green_from_q(x.x, y.x, decay_rate(E, kinetic()));
}

Complex Reflectionless::closed_green_boundary(Point x, Point y, double E, Side side) const {
    return green_from_q(x.x, y.x, boundary_q(E, kinetic(), side));
}

// ---- free plane ----

FreePlane::FreePlane(Units units) : BaseProblem(units) { validate_units(units); }

double FreePlane::mode_energy(std::size_t n) const { no_modes(label(), n); }
Complex FreePlane::mode_value(std::size_t n, Point) const { no_modes(label(), n); }
double FreePlane::mode_peak_density(std::size_t n) const { no_modes(label(), n); }

double FreePlane::kernel(double r, double E) const {
    if (!(E < 0.0)) fail(ErrorCode::CutViolation, "free-plane kernel needs real E < 0");
    if (!(r > 0.0)) fail(ErrorCode::Divergent, "free-plane kernel is singular at r = 0");
    const double c = kinetic();
    return special::bessel_k0(std::sqrt(-E / c) * r) / (2.0 * kPi * c);
}

Complex FreePlane::closed_green(Point x, Point y, Complex E) const {
    if (E.imag() != 0.0)
        fail(ErrorCode::Unsupported, "free-plane closed form is implemented for real E only");
    return kernel(distance(x, y), E.real());
}

Complex FreePlane::closed_green_derivative(Point x, Point y, Complex E) const {
    if (E.imag() != 0.0 || !(E.real() < 0.0))
        fail(ErrorCode::CutViolation, "free-plane derivative needs real E < 0");
    const double c = kinetic();
    const double r = distance(x, y);
    if (r == 0.0) return -1.0 / (4.0 * kPi * c * E.real());
    const double q = std::sqrt(-E.real() / c);
    // d/dE K0(q r) = -K1(q r) r dq/dE, dq/dE = -1/(2 c q)
    return special::bessel_k1(q * r) * r / (4.0 * kPi * c * c * q);
}

}  // namespace krein
