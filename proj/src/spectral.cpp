#include "krein/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "krein/catalog.hpp"

namespace krein {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::PoleProximity: return "PoleProximity";
        case ErrorCode::CutViolation: return "CutViolation";
        case ErrorCode::Unsupported: return "Unsupported";
        case ErrorCode::ZeroOfPhi: return "ZeroOfPhi";
        case ErrorCode::WindowTooNarrow: return "WindowTooNarrow";
        case ErrorCode::NotARoot: return "NotARoot";
        case ErrorCode::NodeLevel: return "NodeLevel";
        case ErrorCode::NonRenormalizedProblem: return "NonRenormalizedProblem";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::NoRootInWindow: return "NoRootInWindow";
        case ErrorCode::Divergent: return "Divergent";
    }
    return "Unknown";
}

Complex decay_rate(Complex E, double kinetic) { return std::sqrt(-E / kinetic); }

void BaseProblem::mode_values(Point x, std::vector<Complex>& out) const {
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = mode_value(n, x);
}

void BaseProblem::build_levels() {
    levels_.clear();
    const std::size_t count = mode_count();
    std::size_t n = 0;
    while (n < count) {
        EnergyLevel lvl;
        lvl.index = levels_.size();
        lvl.energy = mode_energy(n);
        lvl.first_mode = n;
        std::size_t m = n + 1;
        const double tie = 1e-12 * std::max(1.0, std::abs(lvl.energy));
        while (m < count && std::abs(mode_energy(m) - lvl.energy) <= tie) ++m;
        lvl.multiplicity = m - n;
        levels_.push_back(lvl);
        n = m;
    }
}

std::size_t BaseProblem::level_count() const { return levels_.size(); }

EnergyLevel BaseProblem::level(std::size_t k) const {
    if (k >= levels_.size()) fail(ErrorCode::OutOfRange, "level index " + std::to_string(k));
    return levels_[k];
}

std::vector<EnergyLevel> BaseProblem::levels_up_to(double emax, std::size_t min_count) const {
    std::vector<EnergyLevel> out;
    const std::size_t count = level_count();
    for (std::size_t k = 0; k < count; ++k) {
        EnergyLevel lvl = level(k);
        if (lvl.energy > emax && out.size() >= min_count) break;
        out.push_back(lvl);
    }
    return out;
}

double BaseProblem::level_density(std::size_t k, Point a) const {
    const EnergyLevel lvl = level(k);
    double sum = 0.0;
    for (std::size_t n = lvl.first_mode; n < lvl.first_mode + lvl.multiplicity; ++n)
        sum += std::norm(mode_value(n, a));
    return sum;
}

Complex BaseProblem::level_kernel(std::size_t k, Point x, Point y) const {
    const EnergyLevel lvl = level(k);
    Complex sum{};
    for (std::size_t n = lvl.first_mode; n < lvl.first_mode + lvl.multiplicity; ++n)
        sum += mode_value(n, x) * std::conj(mode_value(n, y));
    return sum;
}

double BaseProblem::continuum_infimum() const {
    double inf = std::numeric_limits<double>::infinity();
    for (const auto& ch : channels_) inf = std::min(inf, ch->infimum());
    return inf;
}

Complex BaseProblem::closed_green(Point, Point, Complex) const {
    fail(ErrorCode::Unsupported, label() + " has no closed-form Green's function");
}

Complex BaseProblem::closed_green_boundary(Point, Point, double, Side) const {
    fail(ErrorCode::Unsupported, label() + " has no boundary values");
}

Complex BaseProblem::closed_green_derivative(Point x, Point y, Complex E) const {
    const double scale = std::max(1.0, std::abs(E));
    if (E.imag() == 0.0 && E.real() < continuum_infimum()) {
        // G is real on this part of the axis: complex step.
        const double h = 1e-30 * scale;
        return closed_green(x, y, Complex(E.real(), h)).imag() / h;
    }
    const double h = 1e-3 * scale;
    const Complex d1 = closed_green(x, y, E + h) - closed_green(x, y, E - h);
    const Complex d2 = closed_green(x, y, E + 2.0 * h) - closed_green(x, y, E - 2.0 * h);
    return (8.0 * d1 - d2) / (12.0 * h);
}

SeriesValue BaseProblem::discrete_sum(Point x, Point y, Complex E, int power,
                                      std::optional<std::size_t> skip_level, double) const {
    if (discrete_infinite()) fail(ErrorCode::Unsupported, label() + ": no summation rule");
    SeriesValue out;
    for (std::size_t k = 0; k < level_count(); ++k) {
        if (skip_level && *skip_level == k) continue;
        const EnergyLevel lvl = level(k);
        const Complex d = std::pow(lvl.energy - E, power);
        const Complex kern = level_kernel(k, x, y);
        if (kern != 0.0) out.value += kern / d;
        out.terms += lvl.multiplicity;
    }
    return out;
}

SeriesValue BaseProblem::subtracted_discrete_diagonal(Point a, Complex E, double mu2,
                                                      std::optional<std::size_t> skip_level,
                                                      double) const {
    if (discrete_infinite()) fail(ErrorCode::Unsupported, label() + ": no summation rule");
    SeriesValue out;
    for (std::size_t k = 0; k < level_count(); ++k) {
        if (skip_level && *skip_level == k) continue;
        const EnergyLevel lvl = level(k);
        const double rho = level_density(k, a);
        if (rho != 0.0) out.value += rho * (1.0 / (lvl.energy - E) - 1.0 / (lvl.energy + mu2));
        out.terms += lvl.multiplicity;
    }
    return out;
}

ProblemPtr make_free_line(Units units) { return std::make_shared<FreeLine>(units); }

ProblemPtr make_reflectionless(double kappa, Units units) {
    return std::make_shared<Reflectionless>(kappa, units);
}

ProblemPtr make_harmonic_oscillator(double omega, Units units) {
    return std::make_shared<HarmonicOscillator>(omega, units);
}

ProblemPtr make_flat_torus(double L1, double L2, Units units, std::size_t mode_cap) {
    return std::make_shared<FlatTorus>(L1, L2, units, mode_cap);
}

ProblemPtr make_free_plane(Units units) { return std::make_shared<FreePlane>(units); }

Complex eval_level(const BaseProblem& problem, std::size_t n, Point x) {
    if (n >= problem.mode_count())
        fail(ErrorCode::OutOfRange, problem.label() + ": mode index " + std::to_string(n));
    return problem.mode_value(n, x);
}

Complex eval_channel(const BaseProblem& problem, std::size_t channel, double k, Point x) {
    if (channel >= problem.channels().size())
        fail(ErrorCode::OutOfRange, problem.label() + ": channel index " + std::to_string(channel));
    return problem.channels()[channel]->eigenfunction(k, x);
}

}  // namespace krein
