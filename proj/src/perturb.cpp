#include "krein/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "krein/catalog.hpp"

namespace krein {
namespace {

struct LevelData {
    EnergyLevel level;
    Complex value;  // phi_k(a)
    double density = 0.0;
    double theta = 0.0;
    Complex phase;  // e^{-i theta + i pi}
};

LevelData simple_level(const BaseProblem& problem, std::size_t k, Point a) {
    if (problem.dimension() == 1 && a.y != 0.0)
        fail(ErrorCode::DimensionMismatch, "support point has a second coordinate in a 1D problem");
    if (problem.level_count() == 0)
        fail(ErrorCode::NodeLevel, problem.label() + ": no discrete level to perturb");
    if (k >= problem.level_count()) fail(ErrorCode::OutOfRange, "level index beyond the discrete spectrum");
    LevelData d;
    d.level = problem.level(k);
    if (d.level.multiplicity != 1)
        fail(ErrorCode::Unsupported, "degenerate level: perturbation theory assumes a simple eigenvalue");
    if (is_node(problem, k, a)) fail(ErrorCode::NodeLevel, "phi_k(a) = 0: all corrections vanish");
    d.value = problem.mode_value(d.level.first_mode, a);
    d.density = std::norm(d.value);
    d.theta = std::arg(d.value);
    d.phase = -std::exp(Complex(0.0, -d.theta));
    return d;
}

double nearest_gap(const BaseProblem& problem, std::size_t k) { return 2.0 * regular_contour_radius(problem, k); }

// Direct sum of |phi_n(a)|^2 / (E_n - E_k) over modes with E_n <= cutoff, n outside level k.
double truncated_regular(const BaseProblem& problem, std::size_t k, Point a, double cutoff) {
    const EnergyLevel lvl = problem.level(k);
    if (const auto* torus = dynamic_cast<const FlatTorus*>(&problem))
        return torus->truncated_diagonal(lvl.energy, cutoff, k);
    if (!problem.channels().empty())
        fail(ErrorCode::Unsupported, problem.label() + ": cutoff sums need a purely discrete spectrum");
    double sum = 0.0;
    for (std::size_t n = 0; n < problem.mode_count() && problem.mode_energy(n) <= cutoff; ++n) {
        if (n >= lvl.first_mode && n < lvl.first_mode + lvl.multiplicity) continue;
        sum += std::norm(problem.mode_value(n, a)) / (problem.mode_energy(n) - lvl.energy);
    }
    return sum;
}

void check_renormalized(const BaseProblem& problem, const RenormalizedPerturbation& rpert) {
    if (!(rpert.mu2 > 0.0) || !std::isfinite(rpert.mu2)) fail(ErrorCode::InvalidArgument, "mu2 must be positive");
    if (problem.diagonal_finite())
        fail(ErrorCode::NonRenormalizedProblem,
             problem.label() + ": G0(a,a) is finite; use the regular perturbation series");
}

WavefunctionValues assemble(const BaseProblem& problem, const LevelData& d, double alpha, double s1, double s2,
                            std::size_t k, Point a, Point x, double tol) {
    const Complex phik_x = problem.mode_value(d.level.first_mode, x);
    const Complex g1 = regular_part(problem, k, x, a, 1, tol).value;
    const Complex g2 = regular_part(problem, k, x, a, 2, tol).value;
    WavefunctionValues w;
    w.psi0 = d.phase * phik_x;
    w.psi1 = alpha * d.value * d.phase * g1;
    w.psi2 = d.phase * (-0.5 * alpha * alpha * phik_x * d.density * s2 +
                        alpha * alpha * d.value * (s1 * g1 - d.density * g2));
    return w;
}

}  // namespace

EnergyCorrections energy_corrections(const BaseProblem& problem, const PointPerturbation& pert, std::size_t k,
                                     double tol, std::optional<double> cutoff) {
    if (pert.alpha == 0.0 || !std::isfinite(pert.alpha))
        fail(ErrorCode::InvalidArgument, "coupling alpha must be finite and nonzero");
    const LevelData d = simple_level(problem, k, pert.a);
    double s1 = 0.0;
    if (cutoff) {
        s1 = truncated_regular(problem, k, pert.a, *cutoff);
    } else {
        if (!problem.diagonal_finite())
            fail(ErrorCode::Divergent, problem.label() + ": the second-order sum diverges without a cutoff");
        s1 = regular_part(problem, k, pert.a, pert.a, 1, tol).value.real();
    }
    EnergyCorrections out;
    out.k = k;
    out.E0 = d.level.energy;
    out.E1 = -pert.alpha * d.density;
    out.E2 = -pert.alpha * pert.alpha * d.density * s1;
    out.theta = d.theta;
    out.guard = std::abs(out.E1) / nearest_gap(problem, k);
    out.reliable = out.guard < 1.0;
    return out;
}

WavefunctionValues wavefunction_corrections(const BaseProblem& problem, const PointPerturbation& pert,
                                            std::size_t k, Point x, double tol) {
    if (pert.alpha == 0.0 || !std::isfinite(pert.alpha))
        fail(ErrorCode::InvalidArgument, "coupling alpha must be finite and nonzero");
    if (!problem.diagonal_finite())
        fail(ErrorCode::DimensionMismatch, problem.label() + ": G0(a,a) diverges; use the renormalized series");
    const LevelData d = simple_level(problem, k, pert.a);
    const double s1 = regular_part(problem, k, pert.a, pert.a, 1, tol).value.real();
    const double s2 = regular_part(problem, k, pert.a, pert.a, 2, tol).value.real();
    return assemble(problem, d, pert.alpha, s1, s2, k, pert.a, x, tol);
}

EnergyCorrections energy_corrections_renormalized(const BaseProblem& problem, const RenormalizedPerturbation& rpert,
                                                  std::size_t k, double tol) {
    check_renormalized(problem, rpert);
    if (rpert.inv_alpha_r == 0.0)
        fail(ErrorCode::InvalidArgument, "1/alpha_R = 0 has no small-coupling expansion");
    const LevelData d = simple_level(problem, k, rpert.a);
    const double alpha_r = 1.0 / rpert.inv_alpha_r;
    const double s1r = subtracted_regular(problem, k, rpert.a, rpert.mu2, tol, 1).value.real();
    EnergyCorrections out;
    out.k = k;
    out.E0 = d.level.energy;
    out.E1 = -alpha_r * d.density;
    out.E2 = -alpha_r * alpha_r * d.density * s1r;
    out.theta = d.theta;
    out.guard = std::abs(out.E1) / nearest_gap(problem, k);
    out.reliable = out.guard < 1.0;
    return out;
}

WavefunctionValues wavefunction_corrections_renormalized(const BaseProblem& problem,
                                                         const RenormalizedPerturbation& rpert, std::size_t k,
                                                         Point x, double tol) {
    check_renormalized(problem, rpert);
    if (rpert.inv_alpha_r == 0.0)
        fail(ErrorCode::InvalidArgument, "1/alpha_R = 0 has no small-coupling expansion");
    const LevelData d = simple_level(problem, k, rpert.a);
    const double s1r = subtracted_regular(problem, k, rpert.a, rpert.mu2, tol, 1).value.real();
    const double s2 = subtracted_regular(problem, k, rpert.a, rpert.mu2, tol, 2).value.real();
    return assemble(problem, d, 1.0 / rpert.inv_alpha_r, s1r, s2, k, rpert.a, x, tol);
}

PerturbationResult perturbation_series(const BaseProblem& problem, const PointPerturbation& pert, std::size_t k,
                                       double tol) {
    PerturbationResult out;
    out.energies = energy_corrections(problem, pert, k, tol);
    auto self = problem.shared_from_this();
    const LevelData d = simple_level(problem, k, pert.a);
    const double s1 = regular_part(problem, k, pert.a, pert.a, 1, tol).value.real();
    const double s2 = regular_part(problem, k, pert.a, pert.a, 2, tol).value.real();
    auto eval = [self, d, pert, s1, s2, k, tol](Point x) {
        return assemble(*self, d, pert.alpha, s1, s2, k, pert.a, x, tol);
    };
    out.psi0 = [self, d](Point x) { return d.phase * self->mode_value(d.level.first_mode, x); };
    out.psi1 = [eval](Point x) { return eval(x).psi1; };
    out.psi2 = [eval](Point x) { return eval(x).psi2; };
    return out;
}

PerturbationResult perturbation_series_renormalized(const BaseProblem& problem,
                                                    const RenormalizedPerturbation& rpert, std::size_t k,
                                                    double tol) {
    PerturbationResult out;
    out.energies = energy_corrections_renormalized(problem, rpert, k, tol);
    auto self = problem.shared_from_this();
    const LevelData d = simple_level(problem, k, rpert.a);
    const double s1r = subtracted_regular(problem, k, rpert.a, rpert.mu2, tol, 1).value.real();
    const double s2 = subtracted_regular(problem, k, rpert.a, rpert.mu2, tol, 2).value.real();
    const double alpha_r = 1.0 / rpert.inv_alpha_r;
    const Point a = rpert.a;
    auto eval = [self, d, alpha_r, s1r, s2, k, a, tol](Point x) {
        return assemble(*self, d, alpha_r, s1r, s2, k, a, x, tol);
    };
    out.psi0 = [self, d](Point x) { return d.phase * self->mode_value(d.level.first_mode, x); };
    out.psi1 = [eval](Point x) { return eval(x).psi1; };
    out.psi2 = [eval](Point x) { return eval(x).psi2; };
    return out;
}

// ---------------------------------------------------------------------------

TruncatedModel::TruncatedModel(const BaseProblem& problem, Point a, std::size_t modes) {
    if (modes == 0 || modes > problem.mode_count())
        fail(ErrorCode::OutOfRange, "truncated model needs 1 .. mode_count modes");
    energies_.resize(modes);
    values_.resize(modes);
    problem.mode_values(a, values_);
    for (std::size_t n = 0; n < modes; ++n) energies_[n] = problem.mode_energy(n);
}

double TruncatedModel::phi_regular(double E, double alpha) const {
    double s = 0.0;
    for (std::size_t n = 0; n < size(); ++n) s += std::norm(values_[n]) / (energies_[n] - E);
    return 1.0 / alpha - s;
}

double TruncatedModel::phi_renormalized(double E, double inv_alpha_r, double mu2) const {
    double s = 0.0;
    for (std::size_t n = 0; n < size(); ++n)
        s += std::norm(values_[n]) * (E + mu2) / ((energies_[n] - E) * (energies_[n] + mu2));
    return inv_alpha_r - s;
}

namespace {

bool same_energy(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); }

}  // namespace

double TruncatedModel::root(const std::function<double(double)>& f, std::size_t k, bool attach_above,
                            double tol) const {
    std::vector<double> distinct;
    for (double e : energies_)
        if (distinct.empty() || !same_energy(distinct.back(), e)) distinct.push_back(e);
    if (k >= distinct.size()) fail(ErrorCode::OutOfRange, "truncated model has fewer levels");
    const double Ek = distinct[k];
    const double scale = std::max(1.0, std::abs(Ek));
    const double eps = 1e-13 * scale;
    double lo = 0.0;
    double hi = 0.0;
    if (attach_above) {
        hi = Ek - eps;
        if (k > 0) {
            lo = distinct[k - 1] + eps;
        } else {
            double step = scale;
            lo = Ek - step;
            while (f(lo) <= 0.0) {
                step *= 2.0;
                lo = Ek - step;
                if (step > 1e12 * scale) fail(ErrorCode::NoRootInWindow, "no root below the ground level");
            }
        }
    } else {
        lo = Ek + eps;
        if (k + 1 < distinct.size()) {
            hi = distinct[k + 1] - eps;
        } else {
            double step = scale;
            hi = Ek + step;
            while (f(hi) >= 0.0) {
                step *= 2.0;
                hi = Ek + step;
                if (step > 1e12 * scale) fail(ErrorCode::NoRootInWindow, "no root above the top level");
            }
        }
    }
    double flo = f(lo);
    if (!(flo > 0.0) || !(f(hi) < 0.0)) fail(ErrorCode::NoRootInWindow, "no sign change in the gap");
    const double target = std::max(tol, 4.0 * std::numeric_limits<double>::epsilon()) * scale;
    for (int it = 0; it < 200 && hi - lo > target; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<Complex> TruncatedModel::residue(double Estar) const {
    std::vector<Complex> c(size());
    double norm2 = 0.0;
    for (std::size_t n = 0; n < size(); ++n) {
        c[n] = std::conj(values_[n]) / (energies_[n] - Estar);
        norm2 += std::norm(c[n]);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (Complex& v : c) v *= inv;
    return c;
}

std::array<std::vector<Complex>, 3> TruncatedModel::series(std::size_t k, double alpha, double s1) const {
    if (k >= size()) fail(ErrorCode::OutOfRange, "mode index beyond the truncated model");
    const double Ek = energies_[k];
    for (std::size_t n = 0; n < size(); ++n)
        if (n != k && same_energy(energies_[n], Ek))
            fail(ErrorCode::Unsupported, "degenerate level: perturbation theory assumes a simple eigenvalue");
    const Complex vk = values_[k];
    const double dens = std::norm(vk);
    if (dens == 0.0) fail(ErrorCode::NodeLevel, "phi_k(a) = 0: all corrections vanish");
    const Complex phase = -std::exp(Complex(0.0, -std::arg(vk)));
    const double s2 = regular_sum(k, 2);
    std::array<std::vector<Complex>, 3> out;
    for (auto& v : out) v.assign(size(), Complex{});
    out[0][k] = phase;
    out[2][k] = -0.5 * alpha * alpha * dens * s2 * phase;
    for (std::size_t n = 0; n < size(); ++n) {
        if (n == k) continue;
        const double d = energies_[n] - Ek;
        const Complex g1 = std::conj(values_[n]) / d;
        out[1][n] = alpha * vk * phase * g1;
        out[2][n] = alpha * alpha * vk * phase * (s1 * g1 - dens * g1 / d);
    }
    return out;
}

double TruncatedModel::regular_sum(std::size_t k, int power) const {
    double s = 0.0;
    for (std::size_t n = 0; n < size(); ++n) {
        if (same_energy(energies_[n], energies_[k])) continue;
        s += std::norm(values_[n]) / std::pow(energies_[n] - energies_[k], power);
    }
    return s;
}

double TruncatedModel::renormalized_sum(std::size_t k, double mu2) const {
    const double Ek = energies_[k];
    double s = 0.0;
    double dens = 0.0;
    for (std::size_t n = 0; n < size(); ++n) {
        const double w = std::norm(values_[n]);
        if (same_energy(energies_[n], Ek)) {
            dens += w;
            continue;
        }
        s += w * (Ek + mu2) / ((energies_[n] - Ek) * (energies_[n] + mu2));
    }
    return s - dens / (Ek + mu2);
}

double phase_aligned_distance(const std::vector<Complex>& u, const std::vector<Complex>& v) {
    if (u.size() != v.size()) fail(ErrorCode::InvalidArgument, "vectors differ in length");
    Complex overlap{};
    for (std::size_t n = 0; n < u.size(); ++n) overlap += std::conj(v[n]) * u[n];
    const Complex rot = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0, 0.0);
    double d2 = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) d2 += std::norm(u[n] - rot * v[n]);
    return std::sqrt(d2);
}

}  // namespace krein
