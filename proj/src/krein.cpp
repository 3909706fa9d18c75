#include "krein/krein.hpp"

#include <algorithm>
#include <cmath>

namespace krein {
namespace {

void validate(const BaseProblem& problem, const PointPerturbation& pert) {
    if (pert.alpha == 0.0 || !std::isfinite(pert.alpha))
        fail(ErrorCode::InvalidArgument, "coupling alpha must be finite and nonzero");
    if (problem.dimension() == 1 && pert.a.y != 0.0)
        fail(ErrorCode::DimensionMismatch, "support point has a second coordinate in a 1D problem");
    if (!problem.diagonal_finite())
        fail(ErrorCode::DimensionMismatch,
             problem.label() + ": G0(a,a) diverges; use the renormalized interaction");
}

std::shared_ptr<const BaseProblem> share(const BaseProblem& problem) { return problem.shared_from_this(); }

}  // namespace

std::string_view to_string(StateKind kind) {
    switch (kind) {
        case StateKind::Shifted: return "shifted";
        case StateKind::UnchangedNode: return "unchanged-node";
        case StateKind::UnchangedDegenerate: return "unchanged-degenerate";
    }
    return "unknown";
}

bool is_node(const BaseProblem& problem, std::size_t k, Point a) {
    const EnergyLevel lvl = problem.level(k);
    double peak = 0.0;
    for (std::size_t n = lvl.first_mode; n < lvl.first_mode + lvl.multiplicity; ++n)
        peak = std::max(peak, problem.mode_peak_density(n));
    return problem.level_density(k, a) < 1e-24 * peak;
}

std::vector<SecularPole> secular_poles(const BaseProblem& problem, Point a, double emax) {
    std::vector<SecularPole> poles;
    const std::size_t count = problem.level_count();
    bool above = false;
    for (std::size_t k = 0; k < count && !above; ++k) {
        const EnergyLevel lvl = problem.level(k);
        SecularPole p;
        p.energy = lvl.energy;
        p.level = k;
        p.node = is_node(problem, k, a);
        p.guard = pole_guard(problem, k);
        poles.push_back(p);
        if (lvl.energy > emax && !p.node) above = true;
        if (poles.size() > 100000) break;
    }
    return poles;
}

double phi(const BaseProblem& problem, const PointPerturbation& pert, double E, double tol) {
    return phi(problem, pert, Complex(E, 0.0), tol).real();
}

Complex phi(const BaseProblem& problem, const PointPerturbation& pert, Complex E, double tol) {
    validate(problem, pert);
    return 1.0 / pert.alpha - green0(problem, pert.a, pert.a, E, tol).value;
}

Complex phi_boundary(const BaseProblem& problem, const PointPerturbation& pert, double E, Side side) {
    validate(problem, pert);
    return 1.0 / pert.alpha - green0_boundary(problem, pert.a, pert.a, E, side);
}

Complex full_green(const BaseProblem& problem, const PointPerturbation& pert, Point x, Point y, Complex E,
                   double tol) {
    validate(problem, pert);
    const Complex gaa = green0(problem, pert.a, pert.a, E, tol).value;
    const Complex p = 1.0 / pert.alpha - gaa;
    if (std::abs(p) <= 1e-14 * (std::abs(1.0 / pert.alpha) + std::abs(gaa)))
        fail(ErrorCode::ZeroOfPhi, "E is a perturbed eigenvalue");
    const Complex gxy = green0(problem, x, y, E, tol).value;
    const Complex gxa = green0(problem, x, pert.a, E, tol).value;
    const Complex gay = green0(problem, pert.a, y, E, tol).value;
    return gxy + gxa * gay / p;
}

std::vector<BoundState> find_bound_states(const BaseProblem& problem, const PointPerturbation& pert,
                                          Window window, double tol) {
    validate(problem, pert);
    const double inf = problem.continuum_infimum();
    window.emax = std::min(window.emax, inf);

    SecularFunction f;
    f.value = [&](double E) { return phi(problem, pert, E, tol); };
    f.slope = [&](double E) { return -green0_derivative(problem, pert.a, E, tol); };
    f.poles = secular_poles(problem, pert.a, window.emax);
    f.top = inf;
    f.limit_below = pert.alpha;  // G0(a,a|E) -> 0+ as E -> -inf
    return collect_bound_states(problem, pert.a, f, window, tol, pert.alpha > 0.0);
}

std::vector<BoundState> collect_bound_states(const BaseProblem& problem, Point a, const SecularFunction& f,
                                             Window window, double tol, bool attach_above) {
    auto self = share(problem);
    std::vector<BoundState> states;
    for (const SecularRoot& r : solve_secular(f, window, tol)) {
        BoundState s;
        s.energy = r.energy;
        s.lo = r.lo;
        s.hi = r.hi;
        s.kind = StateKind::Shifted;
        s.residual = r.residual;
        s.slope = r.slope;
        s.normalization = -r.slope;
        s.level = attach_above ? r.pole_above : r.pole_below;
        if (s.level) s.old_energy = problem.level(*s.level).energy;
        const double norm = std::sqrt(s.normalization);
        const double E = r.energy;
        s.wavefunction = [self, a, E, norm, tol](Point x) { return green0(*self, x, a, E, tol).value / norm; };
        states.push_back(std::move(s));
    }
    for (const SecularPole& p : f.poles) {
        if (p.energy < window.emin || p.energy > window.emax) continue;
        const EnergyLevel lvl = problem.level(p.level);
        if (!p.node && lvl.multiplicity == 1) continue;
        BoundState s;
        s.energy = lvl.energy;
        s.lo = s.hi = lvl.energy;
        s.kind = p.node ? StateKind::UnchangedNode : StateKind::UnchangedDegenerate;
        s.multiplicity = p.node ? lvl.multiplicity : lvl.multiplicity - 1;
        s.level = p.level;
        s.old_energy = lvl.energy;
        if (p.node && lvl.multiplicity == 1) {
            const std::size_t n = lvl.first_mode;
            s.wavefunction = [self, n](Point x) { return self->mode_value(n, x); };
        }
        states.push_back(std::move(s));
    }
    std::sort(states.begin(), states.end(),
              [](const BoundState& l, const BoundState& r) { return l.energy < r.energy; });
    return states;
}

Complex bound_wavefunction(const BaseProblem& problem, const PointPerturbation& pert, double Estar, Point x,
                           double tol) {
    validate(problem, pert);
    // Node level: the state is phi_k itself.
    for (const SecularPole& p : secular_poles(problem, pert.a, Estar)) {
        if (p.node && p.energy == Estar) {
            const EnergyLevel lvl = problem.level(p.level);
            if (lvl.multiplicity != 1)
                fail(ErrorCode::Unsupported, "degenerate node level has no unique wavefunction");
            return problem.mode_value(lvl.first_mode, x);
        }
    }
    const double p = phi(problem, pert, Estar, tol);
    const double d = green0_derivative(problem, pert.a, Estar, tol);
    if (std::abs(p) > std::max(tol, 1e-12) * std::max(1.0, d))
        fail(ErrorCode::NotARoot, "Phi(E*) = " + std::to_string(p) + " is not zero");
    return green0(problem, x, pert.a, Estar, tol).value / std::sqrt(d);
}

std::pair<Complex, Complex> plane_wave_amplitudes(const std::function<Complex(double)>& u, double x0, double k) {
    // u(x0) = A e0 + B / e0, u(x1) = A e1 + B / e1, x1 a quarter wavelength away.
    const double x1 = x0 + kPi / (2.0 * std::abs(k));
    const Complex e0 = std::exp(Complex(0.0, k * x0));
    const Complex e1 = std::exp(Complex(0.0, k * x1));
    const Complex u0 = u(x0);
    const Complex u1 = u(x1);
    const Complex det = e0 / e1 - e1 / e0;
    const Complex A = (u0 / e1 - u1 / e0) / det;
    const Complex B = (e0 * u1 - e1 * u0) / det;
    return {A, B};
}

ScatteringState generalized_eigenfunction(const BaseProblem& problem, const PointPerturbation& pert, double k,
                                          double tol) {
    validate(problem, pert);
    if (!problem.has_boundary_values() || problem.channels().empty())
        fail(ErrorCode::Unsupported, problem.label() + ": needs closed-form boundary values");
    if (k == 0.0) fail(ErrorCode::InvalidArgument, "scattering at threshold k = 0");
    (void)tol;
    const auto& ch = problem.channels().front();
    const double E = ch->dispersion(k);
    const Point a = pert.a;
    const Complex chi_a = ch->eigenfunction(k, a);
    const Complex p = phi_boundary(problem, pert, E, Side::Plus);
    auto self = share(problem);
    auto channel = ch;
    auto eta = [self, channel, a, k, E, chi_a, p](Point x) {
        return channel->eigenfunction(k, x) + self->closed_green_boundary(x, a, E, Side::Plus) * chi_a / p;
    };
    ScatteringState out;
    out.energy = E;
    out.k = k;
    out.values = eta;
    if (problem.dimension() == 1) fill_scattering_coefficients(out, std::abs(a.x));
    return out;
}

void fill_scattering_coefficients(ScatteringState& state, double extent) {
    const double k = state.k;
    const double X = extent + std::max(40.0 / std::abs(k), 20.0);
    auto line = [&](double x) { return state.values(Point{x, 0.0}); };
    const auto [Al, Bl] = plane_wave_amplitudes(line, -X, k);
    const auto [Ar, Br] = plane_wave_amplitudes(line, X, k);
    if (k > 0.0) {
        state.transmission = Ar / Al;
        state.reflection = Bl / Al;
    } else {
        // Incident exp(ikx) travels left; exp(-ikx) on the right is reflected.
        state.transmission = Al / Ar;
        state.reflection = Br / Ar;
    }
    state.has_coefficients = true;
}

InterlacingReport verify_interlacing(const BaseProblem& problem, const PointPerturbation& pert,
                                     std::size_t depth, double tol) {
    validate(problem, pert);
    InterlacingReport report;
    // Levels until `depth` non-node ones are covered, plus one neighbour above.
    std::vector<SecularPole> levels;
    std::size_t non_node = 0;
    for (std::size_t k = 0; k < problem.level_count(); ++k) {
        SecularPole p;
        p.energy = problem.level(k).energy;
        p.level = k;
        p.node = is_node(problem, k, pert.a);
        levels.push_back(p);
        if (!p.node && non_node == depth) break;
        if (!p.node) ++non_node;
    }
    if (non_node < depth || problem.continuum_infimum() <= levels.back().energy) {
        // Not enough discrete levels below the continuum.
        report.all_ok = false;
        return report;
    }
    const double top = levels.back().energy;
    const double emax = pert.alpha > 0.0 ? top - 2.0 * pole_guard(problem, levels.back().level)
                                         : std::min(problem.continuum_infimum(), top + 1.0);
    double spread = 1.0 + std::abs(pert.alpha) * (1.0 + std::abs(pert.alpha) / problem.kinetic());
    std::vector<BoundState> states;
    for (int attempt = 0; attempt < 30; ++attempt) {
        try {
            states = find_bound_states(problem, pert, Window{levels.front().energy - spread, emax}, tol);
            break;
        } catch (const SolverError& e) {
            if (e.code() != ErrorCode::WindowTooNarrow) throw;
            spread *= 4.0;
        }
    }
    report.all_ok = true;
    std::size_t used = 0;
    for (std::size_t i = 0; i < levels.size() && used < depth; ++i) {
        const SecularPole& p = levels[i];
        InterlacingRow row;
        row.level = p.level;
        row.node = p.node;
        row.lower = pert.alpha > 0.0 ? (i == 0 ? -std::numeric_limits<double>::infinity() : levels[i - 1].energy)
                                     : p.energy;
        row.upper = pert.alpha > 0.0 ? p.energy : (i + 1 < levels.size() ? levels[i + 1].energy : top);
        row.value = std::numeric_limits<double>::quiet_NaN();
        for (const BoundState& s : states) {
            if (!s.level || *s.level != p.level) continue;
            if (p.node ? s.kind == StateKind::UnchangedNode : s.kind == StateKind::Shifted) row.value = s.energy;
        }
        if (p.node) {
            row.ok = row.value == p.energy;
        } else {
            row.ok = row.lower < row.value && row.value < row.upper;
            ++used;
        }
        report.all_ok = report.all_ok && row.ok;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace krein
