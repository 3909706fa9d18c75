#pragma once

// Concrete base problems. Most callers only need the factories in spectral.hpp;
// the torus and oscillator expose extra summation entry points used as oracles.

#include <array>
#include <cstdint>

#include "krein/spectral.hpp"

namespace krein {

// chi_k(x) = exp(ikx), weight 1/(2 pi).
class PlaneWaveChannel : public ContinuumChannel {
public:
    explicit PlaneWaveChannel(double kinetic) : c_(kinetic) {}
    double dispersion(double k) const override { return c_ * k * k; }
    double dispersion_slope(double k) const override { return 2.0 * c_ * k; }
    double measure_weight(double) const override { return 1.0 / (2.0 * kPi); }
    Complex eigenfunction(double k, Point x) const override;
    double infimum() const override { return 0.0; }
    double asymptotic_weight() const override { return 1.0 / (2.0 * kPi); }
    double kinetic() const override { return c_; }

private:
    double c_;
};

// chi_k(x) = exp(ikx) (ik - kappa tanh(kappa x)) / (kappa + ik), weight 1/(2 pi).
class ReflectionlessChannel : public ContinuumChannel {
public:
    ReflectionlessChannel(double kappa, double kinetic) : kappa_(kappa), c_(kinetic) {}
    double dispersion(double k) const override { return c_ * k * k; }
    double dispersion_slope(double k) const override { return 2.0 * c_ * k; }
    double measure_weight(double) const override { return 1.0 / (2.0 * kPi); }
    Complex eigenfunction(double k, Point x) const override;
    double infimum() const override { return 0.0; }
    double asymptotic_weight() const override { return 1.0 / (2.0 * kPi); }
    double kinetic() const override { return c_; }

private:
    double kappa_;
    double c_;
};

class FreeLine final : public BaseProblem {
public:
    explicit FreeLine(Units units);
    std::string label() const override { return "free-line"; }
    int dimension() const override { return 1; }
    std::size_t mode_count() const override { return 0; }
    double mode_energy(std::size_t n) const override;
    Complex mode_value(std::size_t n, Point x) const override;
    double mode_peak_density(std::size_t n) const override;
    bool has_closed_form() const override { return true; }
    bool has_boundary_values() const override { return true; }
    Complex closed_green(Point x, Point y, Complex E) const override;
    Complex closed_green_boundary(Point x, Point y, double E, Side side) const override;
    Complex closed_green_derivative(Point x, Point y, Complex E) const override;
};

// V(x) = -2 c kappa^2 sech^2(kappa x): one bound state, no reflection.
class Reflectionless final : public BaseProblem {
public:
    Reflectionless(double kappa, Units units);
    std::string label() const override { return "reflectionless"; }
    int dimension() const override { return 1; }
    double kappa() const { return kappa_; }
    std::size_t mode_count() const override { return 1; }
    double mode_energy(std::size_t n) const override;
    Complex mode_value(std::size_t n, Point x) const override;
    double mode_peak_density(std::size_t n) const override;
    bool has_closed_form() const override { return true; }
    bool has_boundary_values() const override { return true; }
    Complex closed_green(Point x, Point y, Complex E) const override;
    Complex closed_green_boundary(Point x, Point y, double E, Side side) const override;

private:
    // Jost-solution form with decay constant q (Re q > 0, or q = -+ik on the cut).
    Complex green_from_q(double x, double y, Complex q) const;
    double kappa_;
};

class HarmonicOscillator final : public BaseProblem {
public:
    HarmonicOscillator(double omega, Units units);
    std::string label() const override { return "harmonic"; }
    int dimension() const override { return 1; }
    double omega() const { return omega_; }
    bool discrete_infinite() const override { return true; }
    std::size_t mode_count() const override { return kCapacity; }
    double mode_energy(std::size_t n) const override;
    Complex mode_value(std::size_t n, Point x) const override;
    double mode_peak_density(std::size_t n) const override;
    void mode_values(Point x, std::vector<Complex>& out) const override;
    std::size_t level_count() const override { return kCapacity; }
    EnergyLevel level(std::size_t k) const override;
    bool has_analytic_sum() const override { return true; }
    bool direct_skip_supported() const override { return true; }
    SeriesValue discrete_sum(Point x, Point y, Complex E, int power,
                             std::optional<std::size_t> skip_level, double tol) const override;

    // Normalized Hermite functions h_0..h_{count-1} at xi (recurrence).
    static void hermite_functions(double xi, std::vector<double>& out);
    // Plain partial sum over modes 0..count-1 (no tail correction).
    Complex partial_sum(Point x, Point y, Complex E, int power, std::size_t count,
                        std::optional<std::size_t> skip_level) const;

    static constexpr std::size_t kCapacity = std::size_t(1) << 22;

private:
    SeriesValue subtracted_sum(double xi_x, double xi_y, Complex E, int power,
                               std::optional<std::size_t> skip_level, const std::size_t (&counts)[3]) const;

    double omega_;
    double scale_;  // sqrt(m omega / hbar)
};

class FlatTorus final : public BaseProblem {
public:
    FlatTorus(double L1, double L2, Units units, std::size_t mode_cap);
    std::string label() const override { return "torus"; }
    int dimension() const override { return 2; }
    double L1() const { return L1_; }
    double L2() const { return L2_; }
    double area() const { return L1_ * L2_; }
    bool discrete_infinite() const override { return true; }
    std::size_t mode_count() const override { return modes_.size(); }
    double mode_energy(std::size_t n) const override;
    Complex mode_value(std::size_t n, Point x) const override;
    double mode_peak_density(std::size_t) const override { return 1.0 / area(); }
    std::array<std::int64_t, 2> lattice(std::size_t n) const;
    bool has_analytic_sum() const override { return true; }
    SeriesValue discrete_sum(Point x, Point y, Complex E, int power,
                             std::optional<std::size_t> skip_level, double tol) const override;
    SeriesValue subtracted_discrete_diagonal(Point a, Complex E, double mu2,
                                             std::optional<std::size_t> skip_level,
                                             double tol) const override;

    // Direct lattice sum over modes with E_n <= cutoff plus the Weyl-law tail
    // (A/(4 pi c)) density: an independent oracle for the subtracted diagonal.
    SeriesValue shell_subtracted_diagonal(Complex E, double mu2, double cutoff) const;
    // Direct sum of 1/(E_n - E) over modes with E_n <= cutoff, skipping a level.
    double truncated_diagonal(double E, double cutoff, std::optional<std::size_t> skip_level) const;
    // Periodic 1D kernel sum_n exp(i 2 pi n X / L) / (L (c (2 pi n / L)^2 + beta)^power).
    static Complex periodic_kernel(double X, Complex beta, double L, double c, int power);

private:
    struct Mode {
        std::int64_t n1;
        std::int64_t n2;
        double energy;
    };
    Complex skipped_terms(Point x, Point y, Complex E, int power, std::size_t level) const;
    // Reduced separation in [-L/2, L/2].
    static double reduce(double d, double L);

    double L1_;
    double L2_;
    std::vector<Mode> modes_;
};

class FreePlane final : public BaseProblem {
public:
    explicit FreePlane(Units units);
    std::string label() const override { return "free-plane"; }
    int dimension() const override { return 2; }
    std::size_t mode_count() const override { return 0; }
    double mode_energy(std::size_t n) const override;
    Complex mode_value(std::size_t n, Point x) const override;
    double mode_peak_density(std::size_t n) const override;
    double continuum_infimum() const override { return 0.0; }
    bool has_closed_form() const override { return true; }
    Complex closed_green(Point x, Point y, Complex E) const override;
    Complex closed_green_derivative(Point x, Point y, Complex E) const override;
    bool diagonal_finite() const override { return false; }
    // G0 at separation r for real E < 0.
    double kernel(double r, double E) const;
};

}  // namespace krein
