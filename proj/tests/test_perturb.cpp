#include <cmath>
#include <vector>

#include "doctest.h"
#include "krein/catalog.hpp"
#include "krein/perturb.hpp"
#include "oracles.hpp"

using namespace krein;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const SolverError& e) {
        return e.code();
    }
    FAIL("no SolverError raised");
    return ErrorCode::InvalidArgument;
}

double ground_root(const BaseProblem& p, const PointPerturbation& pert) {
    for (const BoundState& s : find_bound_states(p, pert, {p.level(0).energy - 3.0, p.level(0).energy}, 1e-15))
        if (s.kind == StateKind::Shifted && s.level == std::size_t{0}) return s.energy;
    FAIL("no root attached to the ground level");
    return 0.0;
}

}  // namespace

TEST_SUITE("perturb") {

TEST_CASE("oscillator corrections at the origin match the Gamma-function oracle") {
    auto p = make_harmonic_oscillator(1.0, Units{1.0, 1.0});
    const double alpha = 0.02;
    const EnergyCorrections c = energy_corrections(*p, {{0, 0}, alpha}, 0, 1e-12);
    const double d0 = 1.0 / std::sqrt(oracle::pi);
    CHECK(c.E0 == doctest::Approx(0.5));
    CHECK(c.E1 == doctest::Approx(-alpha * d0).epsilon(1e-13));
    // S1 = lim [G0(0,0|E) - d0 / (E0 - E)], symmetric average plus one Richardson step.
    auto sub = [&](double h) {
        auto f = [&](double E) { return oracle::oscillator_origin_diagonal(E, 1, 1, 1) - d0 / (0.5 - E); };
        return 0.5 * (f(0.5 + h) + f(0.5 - h));
    };
    const double s1 = (4.0 * sub(1e-3) - sub(2e-3)) / 3.0;
    CHECK(c.E2 == doctest::Approx(-alpha * alpha * d0 * s1).epsilon(1e-6));
    CHECK(c.reliable);
    CHECK(c.guard == doctest::Approx(alpha * d0).epsilon(1e-12));  // nearest level one quantum away
}

TEST_CASE("reflectionless corrections") {
    auto p = make_reflectionless(1.0);
    const Point a{0.5, 0};
    const EnergyCorrections c = energy_corrections(*p, {a, 0.1}, 0, 1e-12);
    CHECK(c.E1 == doctest::Approx(-0.1 * p->level_density(0, a)).epsilon(1e-13));
    const double s1 = regular_part(*p, 0, a, a, 1, 1e-12).value.real();
    CHECK(c.E2 == doctest::Approx(-0.01 * p->level_density(0, a) * s1).epsilon(1e-12));
    // First-order function is orthogonal to the unperturbed state.
    auto w = [&](double x) { return wavefunction_corrections(*p, {a, 0.1}, 0, {x, 0}, 1e-10); };
    const double ip = oracle::simpson([&](double x) { return (std::conj(w(x).psi0) * w(x).psi1).real(); }, -20, 20, 800);
    CHECK(std::abs(ip) < 1e-5);
    const double n0 = oracle::simpson([&](double x) { return std::norm(w(x).psi0); }, -20, 20, 800);
    CHECK(n0 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("energy residual scales as alpha cubed") {
    const std::vector<double> alphas{1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
    auto osc = make_harmonic_oscillator(1.0, Units{1.0, 1.0});
    auto refl = make_reflectionless(1.0);
    for (const BaseProblem* p : {osc.get(), refl.get()}) {
        const Point a{0.3, 0};
        std::vector<double> res;
        for (double alpha : alphas) {
            const PointPerturbation pert{a, alpha};
            const EnergyCorrections c = energy_corrections(*p, pert, 0, 1e-13);
            res.push_back(std::abs(ground_root(*p, pert) - c.E0 - c.E1 - c.E2));
        }
        const double slope = oracle::loglog_slope(alphas, res);
        CHECK(slope >= 2.7);
        CHECK(slope <= 3.3);
    }
}

TEST_CASE("perturbation series object") {
    auto p = make_reflectionless(1.0);
    const PerturbationResult r = perturbation_series(*p, {{0.2, 0}, 0.05}, 0, 1e-10);
    const WavefunctionValues w = wavefunction_corrections(*p, {{0.2, 0}, 0.05}, 0, {0.9, 0}, 1e-10);
    CHECK(std::abs(r.psi0({0.9, 0}) - w.psi0) < 1e-12);
    CHECK(std::abs(r.psi1({0.9, 0}) - w.psi1) < 1e-9);
    CHECK(std::abs(r.psi2({0.9, 0}) - w.psi2) < 1e-9);
    CHECK(r.energies.E1 < 0.0);
}

TEST_CASE("renormalized corrections on the torus") {
    const double L = 2 * oracle::pi;
    auto p = make_flat_torus(L, L);
    const RenormalizedPerturbation rp{{1.0, 2.0}, 1.0 / 0.1, 1.0};
    const EnergyCorrections c = energy_corrections_renormalized(*p, rp, 0, 1e-11);
    const double d0 = 1.0 / (L * L);
    CHECK(c.E0 == 0.0);
    CHECK(c.E1 == doctest::Approx(-0.1 * d0).epsilon(1e-13));
    const double CR = oracle::torus_ground_subtracted(L, L, 1.0, 1.0, 4e4);
    CHECK(c.E2 == doctest::Approx(-0.01 * d0 * (CR - d0 / 1.0)).epsilon(1e-5));
}

TEST_CASE("truncated torus model: renormalized series converges at third order") {
    const double L = 2 * oracle::pi;
    auto p = make_flat_torus(L, L);
    const Point a{0.4, 1.1};
    const TruncatedModel m(*p, a, 2000);
    CHECK(m.size() == 2000);
    const double mu2 = 1.0;
    const double s1 = m.renormalized_sum(0, mu2);
    const double d0 = 1.0 / (L * L);
    std::vector<double> alphas{0.0025, 0.005, 0.01, 0.02};
    std::vector<double> eres, wres;
    for (double ar : alphas) {
        auto f = [&](double E) { return m.phi_renormalized(E, 1.0 / ar, mu2); };
        const double root = m.root(f, 0, true, 1e-15);
        eres.push_back(std::abs(root - (-ar * d0) - (-ar * ar * d0 * s1)));
        const auto t = m.series(0, ar, s1);
        std::vector<Complex> sum(m.size());
        for (std::size_t n = 0; n < m.size(); ++n) sum[n] = t[0][n] + t[1][n] + t[2][n];
        wres.push_back(phase_aligned_distance(sum, m.residue(root)));
    }
    CHECK(oracle::loglog_slope(alphas, eres) == doctest::Approx(3.0).epsilon(0.1));
    CHECK(oracle::loglog_slope(alphas, wres) == doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("phase aligned distance") {
    std::vector<Complex> u{{1, 0}, {0, 2}, {3, -1}};
    std::vector<Complex> v;
    for (const Complex& z : u) v.push_back(z * std::polar(1.0, 0.7));
    CHECK(phase_aligned_distance(u, v) < 1e-14);
    v[0] += 1e-3;
    CHECK(phase_aligned_distance(u, v) == doctest::Approx(1e-3).epsilon(0.1));
    CHECK_THROWS_AS(phase_aligned_distance(u, {Complex(1, 0)}), SolverError);
}

TEST_CASE("perturbation errors") {
    auto osc = make_harmonic_oscillator(1.0, Units{1.0, 1.0});
    CHECK(code_of([&] { energy_corrections(*osc, {{0, 0}, 0.1}, 1, 1e-10); }) == ErrorCode::NodeLevel);
    CHECK(code_of([&] { energy_corrections(*osc, {{0, 0}, 0.0}, 0, 1e-10); }) == ErrorCode::InvalidArgument);
    auto tor = make_flat_torus(2 * oracle::pi, 2 * oracle::pi);
    CHECK(code_of([&] { energy_corrections(*tor, {{1, 1}, 0.1}, 0, 1e-10); }) == ErrorCode::Divergent);
    CHECK(code_of([&] { energy_corrections(*tor, {{1, 1}, 0.1}, 1, 1e-10, 100.0); }) == ErrorCode::Unsupported);
    CHECK_NOTHROW(energy_corrections(*tor, {{1, 1}, 0.1}, 0, 1e-10, 100.0));
    auto refl = make_reflectionless(1.0);
    CHECK(code_of([&] { energy_corrections_renormalized(*refl, {{0, 0}, 1.0, 1.0}, 0, 1e-10); }) ==
          ErrorCode::NonRenormalizedProblem);
    CHECK(code_of([&] { energy_corrections_renormalized(*tor, {{1, 1}, 0.0, 1.0}, 0, 1e-10); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([&] { energy_corrections(*refl, {{0, 0}, 0.1}, 1, 1e-10); }) == ErrorCode::OutOfRange);
}

}  // TEST_SUITE
