#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "krein/common.hpp"

namespace krein {

// A distinct eigenvalue of H0 and the contiguous block of modes sharing it.
struct EnergyLevel {
    std::size_t index = 0;
    double energy = 0.0;
    std::size_t first_mode = 0;
    std::size_t multiplicity = 1;
};

// Partial result of a spectral sum or integral.
struct SeriesValue {
    Complex value{};
    double error = 0.0;
    std::size_t terms = 0;
};

// One branch of generalized eigenfunctions chi_k, k in R. All catalog channels
// have lambda(k) = c k^2 with infimum 0 and chi(k,x) conj(chi(k,y)) w(k) tending to
// asymptotic_weight() * exp(ik(x-y)) for large |k|.
class ContinuumChannel {
public:
    virtual ~ContinuumChannel() = default;
    virtual double dispersion(double k) const = 0;
    virtual double dispersion_slope(double k) const = 0;
    virtual double measure_weight(double k) const = 0;
    virtual Complex eigenfunction(double k, Point x) const = 0;
    virtual double infimum() const = 0;
    virtual double asymptotic_weight() const = 0;
    virtual double kinetic() const = 0;
};

// Spectral description of H0. Immutable; every method is pure. Instances are
// created through the factories below (shared ownership).
class BaseProblem : public std::enable_shared_from_this<BaseProblem> {
public:
    explicit BaseProblem(Units units) : units_(units) {}
    virtual ~BaseProblem() = default;

    virtual std::string label() const = 0;
    virtual int dimension() const = 0;
    const Units& units() const { return units_; }
    double kinetic() const { return units_.kinetic(); }

    // Discrete modes (individual orthonormal eigenfunctions), sorted by energy.
    virtual bool discrete_infinite() const { return false; }
    virtual std::size_t mode_count() const = 0;
    virtual double mode_energy(std::size_t n) const = 0;
    virtual Complex mode_value(std::size_t n, Point x) const = 0;
    // max_x |phi_n(x)|^2, the local scale of the node threshold.
    virtual double mode_peak_density(std::size_t n) const = 0;
    // Values of modes 0 .. out.size()-1 at x.
    virtual void mode_values(Point x, std::vector<Complex>& out) const;

    // Distinct levels.
    virtual std::size_t level_count() const;
    virtual EnergyLevel level(std::size_t k) const;
    // Levels with energy <= emax (at least min_count when available).
    std::vector<EnergyLevel> levels_up_to(double emax, std::size_t min_count = 0) const;
    // Sum of |phi_n(a)|^2 over the modes of a level.
    double level_density(std::size_t k, Point a) const;
    // phi phi-bar summed over the level: the residue of G0 at E_k.
    Complex level_kernel(std::size_t k, Point x, Point y) const;

    const std::vector<std::shared_ptr<const ContinuumChannel>>& channels() const { return channels_; }
    virtual double continuum_infimum() const;

    // Closed-form Green's function off the cut.
    virtual bool has_closed_form() const { return false; }
    virtual Complex closed_green(Point x, Point y, Complex E) const;
    // Boundary values on the cut (requires side selection support).
    virtual bool has_boundary_values() const { return false; }
    virtual Complex closed_green_boundary(Point x, Point y, double E, Side side) const;
    // dG/dE of the closed form.
    virtual Complex closed_green_derivative(Point x, Point y, Complex E) const;

    // True when the discrete sums may be evaluated at complex E with full accuracy
    // (finite, or an accelerated summation is available).
    virtual bool has_analytic_sum() const { return !discrete_infinite(); }
    // sum over modes not in skip_level of phi_n(x) conj(phi_n(y)) / (E_n - E)^power.
    virtual SeriesValue discrete_sum(Point x, Point y, Complex E, int power,
                                     std::optional<std::size_t> skip_level, double tol) const;
    // sum over modes not in skip_level of |phi_n(a)|^2 [1/(E_n - E) - 1/(E_n + mu2)].
    virtual SeriesValue subtracted_discrete_diagonal(Point a, Complex E, double mu2,
                                                     std::optional<std::size_t> skip_level,
                                                     double tol) const;
    // Whether discrete_sum with skip_level is exact at E = E_skip (no contour needed).
    virtual bool direct_skip_supported() const { return !discrete_infinite(); }
    // Whether G0(a,a|E) is finite (codimension one).
    virtual bool diagonal_finite() const { return dimension() == 1; }

protected:
    // Groups the finite mode list into levels; derived classes call this once.
    void build_levels();

    Units units_;
    std::vector<std::shared_ptr<const ContinuumChannel>> channels_;
    std::vector<EnergyLevel> levels_;
};

using ProblemPtr = std::shared_ptr<const BaseProblem>;

// Catalog.
ProblemPtr make_free_line(Units units = {});
ProblemPtr make_reflectionless(double kappa, Units units = {});
ProblemPtr make_harmonic_oscillator(double omega, Units units = {});
ProblemPtr make_flat_torus(double L1, double L2, Units units = {}, std::size_t mode_cap = 40000);
ProblemPtr make_free_plane(Units units = {});

// Pointwise evaluators.
Complex eval_level(const BaseProblem& problem, std::size_t n, Point x);
Complex eval_channel(const BaseProblem& problem, std::size_t channel, double k, Point x);

// Principal-branch q = sqrt(-E/c) with Re q > 0 off the positive real axis.
Complex decay_rate(Complex E, double kinetic);

}  // namespace krein
