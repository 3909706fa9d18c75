#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "krein/catalog.hpp"
#include "krein/krein.hpp"
#include "oracles.hpp"

using namespace krein;

namespace {

std::vector<BoundState> shifted(const std::vector<BoundState>& all) {
    std::vector<BoundState> out;
    for (const BoundState& s : all)
        if (s.kind == StateKind::Shifted) out.push_back(s);
    return out;
}

// One-sided derivatives by second-order differences.
template <class F>
double right_slope(F f, double a, double h) { return (-3.0 * f(a) + 4.0 * f(a + h) - f(a + 2 * h)) / (2 * h); }
template <class F>
double left_slope(F f, double a, double h) { return (3.0 * f(a) - 4.0 * f(a - h) + f(a - 2 * h)) / (2 * h); }

}  // namespace

TEST_SUITE("krein") {

TEST_CASE("free line secular function vanishes at the bound state") {
    auto p = make_free_line();
    const PointPerturbation pert{{0, 0}, 2.0};
    CHECK(std::abs(phi(*p, pert, -1.0, 1e-12)) < 1e-14);
    CHECK(phi(*p, pert, -0.5, 1e-12) < 0.0);
    CHECK(phi(*p, pert, -2.0, 1e-12) > 0.0);
    const auto states = find_bound_states(*p, pert, {-10.0, 0.0}, 1e-12);
    REQUIRE(states.size() == 1);
    CHECK(std::abs(states[0].energy + 1.0) < 1e-10);
    CHECK_FALSE(states[0].level.has_value());
}

TEST_CASE("reflectionless roots") {
    auto p = make_reflectionless(1.0);
    const double exact = -std::pow((1.0 + std::sqrt(65.0)) / 8.0, 2);
    auto at0 = find_bound_states(*p, {{0, 0}, 0.5}, {-10.0, 0.0}, 1e-12);
    REQUIRE(at0.size() == 1);
    CHECK(std::abs(at0[0].energy - exact) < 1e-6);
    CHECK(at0[0].level == std::size_t{0});

    auto at1 = shifted(find_bound_states(*p, {{1, 0}, 0.5}, {-10.0, 0.0}, 1e-12));
    REQUIRE(at1.size() == 2);
    std::sort(at1.begin(), at1.end(), [](const BoundState& a, const BoundState& b) { return a.energy < b.energy; });
    CHECK(at1[0].energy < -1.0);
    CHECK(at1[1].energy > -1.0);
    CHECK(at1[1].energy < 0.0);
    for (const BoundState& s : at1) {
        CHECK(std::abs(s.residual) < 1e-9);
        CHECK(s.slope < 0.0);
        CHECK(s.normalization > 0.0);
        CHECK(s.lo <= s.energy);
        CHECK(s.energy <= s.hi);
    }
}

TEST_CASE("bound wavefunction: normalization, shape and derivative jump") {
    auto p = make_free_line();
    const PointPerturbation pert{{0.7, 0}, 2.0};
    const auto st = find_bound_states(*p, pert, {-10.0, 0.0}, 1e-12);
    REQUIRE(st.size() == 1);
    const double E = st[0].energy;
    auto psi = [&](double x) { return bound_wavefunction(*p, pert, E, {x, 0}, 1e-12); };
    for (double x : {-3.0, 0.0, 0.7, 1.5, 4.0}) CHECK(std::abs(psi(x)) == doctest::Approx(std::exp(-std::abs(x - 0.7))).epsilon(1e-9));
    const double norm = oracle::simpson([&](double x) { return std::norm(psi(x)); }, -25, 0.7, 4000) +
                        oracle::simpson([&](double x) { return std::norm(psi(x)); }, 0.7, 25, 4000);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-8));

    // Reflectionless: psi'(a+) - psi'(a-) = -(alpha / c) psi(a).
    auto q = make_reflectionless(1.0);
    const PointPerturbation pq{{0.4, 0}, 0.8};
    for (const BoundState& s : shifted(find_bound_states(*q, pq, {-10.0, 0.0}, 1e-12))) {
        auto f = [&](double x) { return bound_wavefunction(*q, pq, s.energy, {x, 0}, 1e-12).real(); };
        const double jump = right_slope(f, 0.4, 1e-4) - left_slope(f, 0.4, 1e-4);
        CHECK(jump == doctest::Approx(-0.8 * f(0.4)).epsilon(1e-5));
        CHECK(s.wavefunction);
        CHECK(std::abs(s.wavefunction({1.3, 0}) - bound_wavefunction(*q, pq, s.energy, {1.3, 0}, 1e-12)) < 1e-12);
    }
}

TEST_CASE("free line scattering matches the closed forms") {
    auto p = make_free_line();
    for (double alpha : {0.5, 2.0, -1.0}) {
        const PointPerturbation pert{{0, 0}, alpha};
        for (double k : {0.1, 0.7, 1.0, 3.0}) {
            const ScatteringState s = generalized_eigenfunction(*p, pert, k, 1e-12);
            REQUIRE(s.has_coefficients);
            const Complex beta = oracle::free_line_beta(k, alpha);
            CHECK(std::abs(s.reflection - beta) < 1e-10);
            CHECK(std::abs(s.transmission - (1.0 + beta)) < 1e-10);
            CHECK(std::abs(std::norm(s.reflection) + std::norm(s.transmission) - 1.0) < 1e-10);
            CHECK(s.energy == doctest::Approx(k * k));
            for (double x : {-2.0, 0.3, 5.0}) {
                const Complex ref = std::exp(Complex(0, k * x)) + beta * std::exp(Complex(0, k * std::abs(x)));
                CHECK(std::abs(s.values({x, 0}) - ref) < 1e-10);
            }
        }
    }
    // Incidence from the right mirrors incidence from the left for a centred delta.
    const ScatteringState l = generalized_eigenfunction(*p, {{0, 0}, 1.0}, 1.2, 1e-12);
    const ScatteringState r = generalized_eigenfunction(*p, {{0, 0}, 1.0}, -1.2, 1e-12);
    CHECK(std::abs(l.transmission - r.transmission) < 1e-10);
    CHECK(std::abs(l.reflection - r.reflection) < 1e-10);
}

TEST_CASE("reflectionless scattering: unitarity and derivative jump") {
    auto p = make_reflectionless(1.0);
    const PointPerturbation pert{{0.6, 0}, 1.5};
    oracle::Draws draw(5);
    for (int i = 0; i < 6; ++i) {
        const double k = draw(0.2, 4.0);
        const ScatteringState s = generalized_eigenfunction(*p, pert, k, 1e-12);
        REQUIRE(s.has_coefficients);
        CHECK(std::abs(std::norm(s.reflection) + std::norm(s.transmission) - 1.0) < 1e-8);
        for (int part = 0; part < 2; ++part) {
            auto f = [&](double x) {
                const Complex v = s.values({x, 0});
                return part ? v.imag() : v.real();
            };
            const double jump = right_slope(f, 0.6, 1e-4) - left_slope(f, 0.6, 1e-4);
            CHECK(std::abs(jump + 1.5 * f(0.6)) < 1e-5 * std::max(1.0, std::abs(f(0.6))));
        }
    }
    // Without the perturbation the potential is reflectionless.
    const ScatteringState s0 = generalized_eigenfunction(*p, {{0.6, 0}, 1e-14}, 1.0, 1e-12);
    CHECK(std::norm(s0.reflection) < 1e-20);
}

TEST_CASE("interlacing on the oscillator") {
    auto p = make_harmonic_oscillator(1.0, Units{1.0, 1.0});
    for (double alpha : {0.5, -0.5, 4.0}) {
        const InterlacingReport r = verify_interlacing(*p, {{0.3, 0}, alpha}, 6, 1e-12);
        CHECK(r.all_ok);
        CHECK(r.rows.size() >= 6);
        for (const InterlacingRow& row : r.rows) {
            CHECK(row.ok);
            if (alpha > 0)
                CHECK(row.value < p->level(row.level).energy);
            else
                CHECK(row.value > p->level(row.level).energy);
        }
    }
    // At the origin the odd levels are nodes and stay put.
    const InterlacingReport r = verify_interlacing(*p, {{0, 0}, 2.0}, 4, 1e-12);
    CHECK(r.all_ok);
    int nodes = 0;
    for (const InterlacingRow& row : r.rows)
        if (row.node) {
            ++nodes;
            CHECK(row.level % 2 == 1);
            CHECK(std::abs(row.value - p->level(row.level).energy) < 1e-9);
        }
    CHECK(nodes >= 3);
}

TEST_CASE("node levels are reported unchanged") {
    auto p = make_harmonic_oscillator(1.0, Units{1.0, 1.0});
    CHECK(is_node(*p, 1, {0, 0}));
    CHECK_FALSE(is_node(*p, 2, {0, 0}));
    const auto states = find_bound_states(*p, {{0, 0}, 1.0}, {-5.0, 4.0}, 1e-12);
    int node = 0;
    for (const BoundState& s : states)
        if (s.kind == StateKind::UnchangedNode) {
            ++node;
            CHECK(std::abs(s.energy - p->level(*s.level).energy) < 1e-15);
            CHECK(*s.level % 2 == 1);
        }
    CHECK(node == 2);  // E = 1.5 and 3.5
    for (const auto& pole : secular_poles(*p, {0, 0}, 4.0)) CHECK(pole.node == (pole.level % 2 == 1));
}

TEST_CASE("poles of G0 cancel in the full Green's function") {
    auto p = make_reflectionless(1.0);
    const PointPerturbation pert{{1, 0}, 0.5};
    oracle::Draws draw(99);
    for (int i = 0; i < 5; ++i) {
        const Point x{draw(-3, 3), 0};
        const Point y{draw(-3, 3), 0};
        double gmin = 1e300, gmax = 0, g0max = 0;
        for (int j = 2; j <= 6; ++j)
            for (double side : {-1.0, 1.0}) {
                const double E = -1.0 * (1 + side * std::pow(10.0, -j));
                const double g = std::abs(full_green(*p, pert, x, y, E, 1e-12));
                gmin = std::min(gmin, g);
                gmax = std::max(gmax, g);
                g0max = std::max(g0max, std::abs(green0(*p, x, y, E, 1e-12).value));
            }
        CHECK(gmax < 10.0 * gmin);
        CHECK(g0max > 1e4);
    }
}

TEST_CASE("full Green's function symmetry and weak coupling") {
    auto p = make_reflectionless(1.0);
    const PointPerturbation pert{{0.3, 0}, 0.9};
    const Complex a = full_green(*p, pert, {0.5, 0}, {-1.2, 0}, -2.3, 1e-12);
    const Complex b = full_green(*p, pert, {-1.2, 0}, {0.5, 0}, -2.3, 1e-12);
    CHECK(std::abs(a - b) < 1e-13);
    const Complex g0 = green0(*p, {0.5, 0}, {-1.2, 0}, -2.3, 1e-12).value;
    CHECK(std::abs(full_green(*p, {{0.3, 0}, 1e-9}, {0.5, 0}, {-1.2, 0}, -2.3, 1e-12) - g0) < 1e-8);

    // alpha -> 0: E* - E0 ~ -alpha |phi0(a)|^2.
    const double alpha = 1e-5;
    const auto st = shifted(find_bound_states(*p, {{0.3, 0}, alpha}, {-10.0, 0.0}, 1e-13));
    REQUIRE(st.size() == 1);
    const double d0 = p->level_density(0, {0.3, 0});
    CHECK((st[0].energy + 1.0) / alpha == doctest::Approx(-d0).epsilon(1e-3));
}

TEST_CASE("window and argument errors") {
    auto p = make_free_line();
    try {
        find_bound_states(*p, {{0, 0}, 2.0}, {-0.5, 0.0}, 1e-12);
        FAIL("expected WindowTooNarrow");
    } catch (const SolverError& e) {
        CHECK(e.code() == ErrorCode::WindowTooNarrow);
    }
    CHECK(find_bound_states(*p, {{0, 0}, -2.0}, {-10.0, 0.0}, 1e-12).empty());
    auto q = make_reflectionless(1.0);
    CHECK_THROWS_AS(phi(*q, {{0, 0}, 0.5}, -1.0, 1e-12), SolverError);
}

}  // TEST_SUITE
