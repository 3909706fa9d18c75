#include "krein/renorm.hpp"

#include <cmath>

#include "krein/catalog.hpp"

namespace krein {
namespace {

void validate(const BaseProblem& problem, const RenormalizedPerturbation& r) {
    if (!(r.mu2 > 0.0) || !std::isfinite(r.mu2)) fail(ErrorCode::InvalidArgument, "mu2 must be positive");
    if (!std::isfinite(r.inv_alpha_r)) fail(ErrorCode::InvalidArgument, "1/alpha_R must be finite");
    if (problem.dimension() == 1 && r.a.y != 0.0)
        fail(ErrorCode::DimensionMismatch, "support point has a second coordinate in a 1D problem");
}

Complex subtracted_value(const BaseProblem& problem, Point a, Complex E, double mu2, double tol, double* error) {
    *error = 0.0;
    if (const auto* plane = dynamic_cast<const FreePlane*>(&problem)) {
        if (E.imag() != 0.0 || !(E.real() < 0.0))
            fail(ErrorCode::CutViolation, "free-plane subtracted kernel needs real E < 0");
        return std::log(mu2 / -E.real()) / (4.0 * kPi * plane->kinetic());
    }
    if (problem.diagonal_finite()) {
        const GreenEvaluation g = green0(problem, a, a, E, tol);
        const GreenEvaluation g0 = green0(problem, a, a, Complex(-mu2, 0.0), tol);
        *error = g.quadrature_error + g0.quadrature_error;
        return g.value - g0.value;
    }
    if (!problem.channels().empty())
        fail(ErrorCode::Unsupported, problem.label() + ": 2D continuum channels are not summable");
    const SeriesValue s = problem.subtracted_discrete_diagonal(a, E, mu2, std::nullopt, tol);
    *error = s.error;
    return s.value;
}

}  // namespace

GreenEvaluation subtracted_diagonal(const BaseProblem& problem, Point a, Complex E, double mu2, double tol) {
    if (!(mu2 > 0.0)) fail(ErrorCode::InvalidArgument, "mu2 must be positive");
    check_pole_guard(problem, E);
    if (-mu2 >= problem.continuum_infimum())
        fail(ErrorCode::CutViolation, "renormalization point -mu2 lies in the continuum");
    check_pole_guard(problem, Complex(-mu2, 0.0));
    GreenEvaluation out;
    out.method = problem.has_closed_form() ? GreenMethod::ClosedForm : GreenMethod::Expansion;
    out.value = subtracted_value(problem, a, E, mu2, tol, &out.quadrature_error);
    return out;
}

GreenEvaluation subtracted_regular(const BaseProblem& problem, std::size_t k, Point a, double mu2, double tol,
                                   int power, RegularMethod method) {
    if (!(mu2 > 0.0)) fail(ErrorCode::InvalidArgument, "mu2 must be positive");
    if (power != 1 && power != 2) fail(ErrorCode::InvalidArgument, "power must be 1 or 2");
    const EnergyLevel lvl = problem.level(k);
    const double dens = problem.level_density(k, a);
    if (method == RegularMethod::Automatic)
        method = problem.direct_skip_supported() && !problem.has_closed_form() ? RegularMethod::Expansion
                                                                               : RegularMethod::Contour;
    GreenEvaluation out;
    out.method = GreenMethod::Expansion;
    if (method == RegularMethod::Expansion && power == 2) {
        const SeriesValue s = problem.discrete_sum(a, a, Complex(lvl.energy, 0.0), 2, k, tol);
        out.value = s.value;
        out.quadrature_error = s.error;
        out.truncation_index = s.terms;
        if (!problem.channels().empty()) {
            const GreenEvaluation c = continuum_integral(problem, a, a, Complex(lvl.energy, 0.0), 2, tol);
            out.value += c.value;
            out.quadrature_error += c.quadrature_error;
        }
        return out;
    }
    if (method == RegularMethod::Expansion) {
        const SeriesValue s = problem.subtracted_discrete_diagonal(a, Complex(lvl.energy, 0.0), mu2, k, tol);
        out.value = s.value - dens / (lvl.energy + mu2);
        out.quadrature_error = s.error;
        out.truncation_index = s.terms;
        if (!problem.channels().empty()) {
            const GreenEvaluation c1 = continuum_integral(problem, a, a, Complex(lvl.energy, 0.0), 1, tol);
            const GreenEvaluation c0 = continuum_integral(problem, a, a, Complex(-mu2, 0.0), 1, tol);
            out.value += c1.value - c0.value;
            out.quadrature_error += c1.quadrature_error + c0.quadrature_error;
        }
        return out;
    }
    const double rho = regular_contour_radius(problem, k);
    double err_sum = 0.0;
    auto f = [&](Complex E) {
        double err = 0.0;
        const Complex s = subtracted_value(problem, a, E, mu2, tol, &err);
        err_sum += err;
        return s - dens / (lvl.energy - E);
    };
    out.value = contour_coefficient(f, lvl.energy, rho, power - 1, 64, &out.quadrature_error);
    out.quadrature_error += err_sum / 64.0;
    out.truncation_index = 64;
    return out;
}

double phi_renormalized(const BaseProblem& problem, const RenormalizedPerturbation& rpert, double E, double tol) {
    validate(problem, rpert);
    return rpert.inv_alpha_r - subtracted_diagonal(problem, rpert.a, Complex(E, 0.0), rpert.mu2, tol).value.real();
}

std::vector<BoundState> find_bound_states_renormalized(const BaseProblem& problem,
                                                       const RenormalizedPerturbation& rpert, Window window,
                                                       double tol) {
    validate(problem, rpert);
    window.emax = std::min(window.emax, problem.continuum_infimum());
    SecularFunction f;
    f.value = [&](double E) { return phi_renormalized(problem, rpert, E, tol); };
    f.slope = [&](double E) { return -green0_derivative(problem, rpert.a, E, tol); };
    f.poles = secular_poles(problem, rpert.a, window.emax);
    f.top = problem.continuum_infimum();
    // Phi_R(-inf) = +inf in two dimensions; 1/alpha_R + G0(a,a|-mu2) in one.
    f.limit_below = problem.diagonal_finite()
                        ? rpert.inv_alpha_r + green0(problem, rpert.a, rpert.a, Complex(-rpert.mu2, 0.0), tol).value.real()
                        : 1.0;
    return collect_bound_states(problem, rpert.a, f, window, tol, f.limit_below > 0.0);
}

Complex full_green_renormalized(const BaseProblem& problem, const RenormalizedPerturbation& rpert, Point x,
                                Point y, Complex E, double tol) {
    validate(problem, rpert);
    const Complex s = subtracted_diagonal(problem, rpert.a, E, rpert.mu2, tol).value;
    const Complex p = rpert.inv_alpha_r - s;
    if (std::abs(p) <= 1e-14 * (std::abs(rpert.inv_alpha_r) + std::abs(s) + 1e-300))
        fail(ErrorCode::ZeroOfPhi, "E is a perturbed eigenvalue");
    const Complex gxy = green0(problem, x, y, E, tol).value;
    const Complex gxa = green0(problem, x, rpert.a, E, tol).value;
    const Complex gay = green0(problem, rpert.a, y, E, tol).value;
    return gxy + gxa * gay / p;
}

double coupling_flow(const BaseProblem& problem, Point a, double inv_alpha_r, double mu2_from, double mu2_to,
                     double tol) {
    if (!(mu2_from > 0.0) || !(mu2_to > 0.0)) fail(ErrorCode::InvalidArgument, "scales must be positive");
    if (mu2_from == mu2_to) return inv_alpha_r;
    // Phi_R(-mu2_to) at the new scale is exactly 1/alpha_R'.
    return inv_alpha_r - subtracted_diagonal(problem, a, Complex(-mu2_to, 0.0), mu2_from, tol).value.real();
}

}  // namespace krein
