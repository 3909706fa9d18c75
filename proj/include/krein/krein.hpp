#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "krein/greens.hpp"
#include "krein/secular.hpp"
#include "krein/spectral.hpp"

namespace krein {

// H = H0 - alpha delta(x - a); alpha > 0 attracts.
struct PointPerturbation {
    Point a;
    double alpha = 1.0;
};

enum class StateKind {
    Shifted,
    UnchangedNode,        // phi_k(a) = 0: the level is untouched
    UnchangedDegenerate,  // the (multiplicity - 1)-fold remainder of a degenerate level
};

std::string_view to_string(StateKind kind);

struct BoundState {
    double energy = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    StateKind kind = StateKind::Shifted;
    double normalization = 0.0;  // dG0(a,a|E)/dE at E* (shifted states)
    std::size_t multiplicity = 1;
    std::optional<std::size_t> level;  // old level the state is attached to
    double old_energy = std::numeric_limits<double>::quiet_NaN();
    double residual = 0.0;  // Phi(E*)
    double slope = 0.0;     // Phi'(E*)
    std::function<Complex(Point)> wavefunction;  // empty for degenerate remainders
};

struct ScatteringState {
    double energy = 0.0;
    double k = 0.0;
    Complex reflection{};
    Complex transmission{};
    bool has_coefficients = false;
    std::function<Complex(Point)> values;
};

struct InterlacingRow {
    std::size_t level = 0;
    double lower = 0.0;
    double value = 0.0;
    double upper = 0.0;
    bool node = false;
    bool ok = false;
};

struct InterlacingReport {
    std::vector<InterlacingRow> rows;
    bool all_ok = false;
};

// |phi_k(a)|^2 summed over the level is below 1e-24 times the peak density.
bool is_node(const BaseProblem& problem, std::size_t k, Point a);

// Poles of the secular function for support a: levels up to emax and the first
// non-node level above it (when one exists).
std::vector<SecularPole> secular_poles(const BaseProblem& problem, Point a, double emax);

// Phi(E) = 1/alpha - G0(a,a|E).
double phi(const BaseProblem& problem, const PointPerturbation& pert, double E, double tol);
Complex phi(const BaseProblem& problem, const PointPerturbation& pert, Complex E, double tol);
Complex phi_boundary(const BaseProblem& problem, const PointPerturbation& pert, double E, Side side);

// G(x,y|E) = G0(x,y|E) + G0(x,a|E) G0(a,y|E) / Phi(E).
Complex full_green(const BaseProblem& problem, const PointPerturbation& pert, Point x, Point y, Complex E,
                   double tol);

std::vector<BoundState> find_bound_states(const BaseProblem& problem, const PointPerturbation& pert,
                                          Window window, double tol);

// psi(x) = G0(x,a|E*) / sqrt(dG0(a,a|E*)/dE); a node level returns phi_k.
Complex bound_wavefunction(const BaseProblem& problem, const PointPerturbation& pert, double Estar, Point x,
                           double tol);

// eta_E = chi_k + G0(x,a|E+i0) chi_k(a) / Phi(E+i0), E = c k^2; k < 0 is incident from the right.
ScatteringState generalized_eigenfunction(const BaseProblem& problem, const PointPerturbation& pert, double k,
                                          double tol);

// Checks E_{k-1} < E_k* < E_k (alpha > 0) or E_k < E_k* < E_{k+1} (alpha < 0)
// for the first `depth` non-node levels; node levels must stay put.
InterlacingReport verify_interlacing(const BaseProblem& problem, const PointPerturbation& pert,
                                     std::size_t depth, double tol);

// Shared by the regular and renormalized searches: roots of f in the window plus
// unchanged node / degenerate-remainder states. attach_above selects whether a
// shifted root is attributed to the pole above its gap (attractive ordering).
std::vector<BoundState> collect_bound_states(const BaseProblem& problem, Point a, const SecularFunction& f,
                                             Window window, double tol, bool attach_above);

// Far-field amplitudes of a 1D function u ~ A exp(ikx) + B exp(-ikx) around x0.
std::pair<Complex, Complex> plane_wave_amplitudes(const std::function<Complex(double)>& u, double x0, double k);

// R and T of a 1D scattering state from its far field beyond |x| = extent.
void fill_scattering_coefficients(ScatteringState& state, double extent);

}  // namespace krein
