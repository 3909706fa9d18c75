#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "krein/spectral.hpp"

namespace krein {

enum class GreenMethod { ClosedForm, Expansion };

struct GreenEvaluation {
    Complex value{};
    std::size_t truncation_index = 0;
    double quadrature_error = 0.0;
    GreenMethod method = GreenMethod::ClosedForm;
};

struct GreenOptions {
    bool force_expansion = false;
};

// Reject E within 1e-8 max(1, local spacing) of a discrete level.
void check_pole_guard(const BaseProblem& problem, Complex E);
// As above, ignoring levels that vanish at x or y (no residue in G0(x, y | E)).
void check_pole_guard(const BaseProblem& problem, Complex E, Point x, Point y);
// Guard half-width around level k.
double pole_guard(const BaseProblem& problem, std::size_t k);

// G0(x,y|E). Real E inside the continuum returns the +i0 value when the
// problem has boundary values, otherwise raises CutViolation.
GreenEvaluation green0(const BaseProblem& problem, Point x, Point y, Complex E, double tol,
                       GreenOptions options = {});

// G0(x,y|E +- i0) for E real (closed forms with side selection only).
Complex green0_boundary(const BaseProblem& problem, Point x, Point y, double E, Side side);

// dG0(a,a|E)/dE > 0 for real E off the spectrum.
double green0_derivative(const BaseProblem& problem, Point a, double E, double tol);

// dG0(x,y|E)/dE, sum_n phi_n(x) phi_n(y)^* / (E_n - E)^2 + continuum.
GreenEvaluation green0_energy_derivative(const BaseProblem& problem, Point x, Point y, Complex E,
                                         double tol, GreenOptions options = {});

// Continuum part: sum over channels of int w chi(x) chi(y)^* / (lambda - E)^power dk.
GreenEvaluation continuum_integral(const BaseProblem& problem, Point x, Point y, Complex E, int power,
                                   double tol);

// Spectral density rho(x,y,E) = sum over channels and k with lambda(k) = E of
// w chi_k(x) conj(chi_k(y)) / |lambda'(k)|; G0(E+i0) - G0(E-i0) = 2 pi i rho.
Complex spectral_density(const BaseProblem& problem, Point x, Point y, double E);

enum class RegularMethod { Automatic, Contour, Expansion };

// Level-k-excluded kernel at E = E_k:
//   power 1: sum_{n not in k} phi_n(x) phi_n(y)^* / (E_n - E_k) + continuum
//   power 2: the same with squared denominators.
GreenEvaluation regular_part(const BaseProblem& problem, std::size_t k, Point x, Point y, int power,
                             double tol, RegularMethod method = RegularMethod::Automatic);

// Radius of the contour used around level k: half the distance to the nearest
// other singularity (level or continuum edge).
double regular_contour_radius(const BaseProblem& problem, std::size_t k);

// Taylor coefficient of order `order` of an analytic f at `center` from the
// trapezoid rule on the circle of radius rho. error: |nodes vs nodes/2|.
Complex contour_coefficient(const std::function<Complex(Complex)>& f, double center, double rho, int order,
                            int nodes, double* error = nullptr);

}  // namespace krein
