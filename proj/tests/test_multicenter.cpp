#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "krein/catalog.hpp"
#include "krein/multicenter.hpp"
#include "oracles.hpp"

using namespace krein;

namespace {

std::vector<double> energies(const std::vector<BoundState>& states) {
    std::vector<double> out;
    for (const BoundState& s : states)
        if (s.kind == StateKind::Shifted) out.push_back(s.energy);
    std::sort(out.begin(), out.end());
    return out;
}

CenterSet random_centers(oracle::Draws& draw, int n) {
    std::vector<Point> pts;
    std::vector<double> alphas;
    while (int(pts.size()) < n) {
        const double x = draw(-3, 3);
        bool ok = true;
        for (const Point& p : pts) ok = ok && std::abs(p.x - x) > 0.3;
        if (!ok) continue;
        pts.push_back({x, 0});
        alphas.push_back(draw(0.3, 2.5));
    }
    return CenterSet(pts, alphas);
}

}  // namespace

TEST_SUITE("multicenter") {

TEST_CASE("one center reduces to the scalar problem") {
    auto p = make_reflectionless(1.0);
    const CenterSet one({{0.6, 0}}, {0.8});
    const auto m = energies(find_bound_states_multicenter(*p, one, {-10, 0}, 1e-12));
    const auto s = energies(find_bound_states(*p, {{0.6, 0}, 0.8}, {-10, 0}, 1e-12));
    REQUIRE(m.size() == s.size());
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(std::abs(m[i] - s[i]) < 1e-10);
    const PrincipalMatrix pm = phi_matrix(*p, one, -2.0, 1e-12);
    CHECK(std::abs(pm.matrix(0, 0) - phi(*p, {{0.6, 0}, 0.8}, Complex(-2.0, 0.0), 1e-12)) < 1e-13);
}

TEST_CASE("principal matrix entries") {
    auto p = make_free_line();
    const CenterSet c({{0, 0}, {2, 0}}, {1.0, 3.0});
    const PrincipalMatrix pm = phi_matrix(*p, c, -1.0, 1e-12);
    CHECK(std::abs(pm.matrix(0, 0) - (1.0 - 0.5)) < 1e-14);
    CHECK(std::abs(pm.matrix(1, 1) - (1.0 / 3.0 - 0.5)) < 1e-14);
    CHECK(std::abs(pm.matrix(0, 1) + 0.5 * std::exp(-2.0)) < 1e-14);
    CHECK((pm.matrix - pm.matrix.adjoint()).norm() < 1e-14);
    CHECK(pm.condition >= 1.0);
}

TEST_CASE("double well matches the even and odd secular equations") {
    auto p = make_free_line();
    for (double D : {0.5, 1.0, 3.0}) {
        for (double alpha : {0.8, 1.5, 4.0}) {
            const CenterSet c({{-D / 2, 0}, {D / 2, 0}}, {alpha, alpha});
            const auto e = energies(find_bound_states_multicenter(*p, c, {-40, 0}, 1e-13));
            const auto ref = oracle::double_well(alpha, D);
            REQUIRE(e.size() == ref.size());
            for (std::size_t i = 0; i < e.size(); ++i) CHECK(std::abs(e[i] - ref[i]) <= 1e-8);
        }
    }
}

TEST_CASE("determinant and recursion agree for up to four random centers") {
    oracle::Draws draw(31337);
    auto line = make_free_line();
    auto refl = make_reflectionless(1.0);
    for (const BaseProblem* p : {line.get(), refl.get()})
        for (int n = 2; n <= 4; ++n)
            for (int trial = 0; trial < 2; ++trial) {
                const CenterSet c = random_centers(draw, n);
                MulticenterReport report;
                const auto det = energies(find_bound_states_multicenter(*p, c, {-60, 0}, 1e-12, {}, &report));
                const auto rec = recursive_bound_states(*p, c, {-60, 0}, 1e-12);
                REQUIRE(det.size() == rec.size());
                for (std::size_t i = 0; i < det.size(); ++i) CHECK(std::abs(det[i] - rec[i]) <= 1e-8);
                CHECK(report.consistent);
                CHECK(report.max_deviation <= 1e-8);
                CHECK(det.size() <= std::size_t(n) + p->level_count());
            }
}

TEST_CASE("prefix interlacing: adding an attractive center lowers every level") {
    auto p = make_reflectionless(1.0);
    const CenterSet c({{-1.2, 0}, {0.4, 0}, {1.9, 0}}, {1.0, 0.7, 1.3});
    std::vector<double> prev = energies(find_bound_states_multicenter(*p, c.prefix(1), {-30, 0}, 1e-12));
    for (std::size_t n = 2; n <= 3; ++n) {
        const auto cur = energies(find_bound_states_multicenter(*p, c.prefix(n), {-30, 0}, 1e-12));
        REQUIRE(cur.size() >= prev.size());
        // cur_i <= prev_i, and prev_i <= cur_{i+1} for a rank-one update.
        for (std::size_t i = 0; i < prev.size(); ++i) {
            CHECK(cur[i] <= prev[i] + 1e-12);
            if (i + 1 < cur.size()) CHECK(prev[i] <= cur[i + 1] + 1e-12);
        }
        prev = cur;
    }
    CHECK_THROWS_AS(c.prefix(0), SolverError);
}

TEST_CASE("well separated centers decouple") {
    auto p = make_free_line();
    const double D = 30.0;
    const CenterSet c({{0, 0}, {D, 0}}, {2.0, 4.0});
    const auto e = energies(find_bound_states_multicenter(*p, c, {-40, 0}, 1e-13));
    REQUIRE(e.size() == 2);
    // Isolated levels -alpha^2 / 4c; coupling corrections are O(exp(-q D)).
    CHECK(std::abs(e[0] + 4.0) < 1e-10);
    CHECK(std::abs(e[1] + 1.0) < 1e-10);
}

TEST_CASE("multicenter scattering is unitary") {
    auto p = make_free_line();
    const CenterSet c({{-0.7, 0}, {0.2, 0}, {1.5, 0}}, {1.0, -0.6, 2.0});
    for (int i = 1; i <= 20; ++i) {
        const double k = 0.25 * i;
        const ScatteringState s = generalized_eigenfunction_multicenter(*p, c, k, 1e-12);
        REQUIRE(s.has_coefficients);
        CHECK(std::abs(std::norm(s.reflection) + std::norm(s.transmission) - 1.0) < 1e-10);
    }
    // A single center reproduces the closed-form amplitude.
    const CenterSet single({{0, 0}}, {2.0});
    const ScatteringState s1 = generalized_eigenfunction_multicenter(*p, single, 1.3, 1e-12);
    CHECK(std::abs(s1.reflection - oracle::free_line_beta(1.3, 2.0)) < 1e-10);
    CHECK_THROWS_AS(generalized_eigenfunction_multicenter(*p, single, 0.0, 1e-12), SolverError);
}

TEST_CASE("full multicenter Green's function") {
    auto p = make_reflectionless(1.0);
    const CenterSet c({{-0.5, 0}, {1.0, 0}}, {0.9, 1.4});
    const Complex a = full_green_multicenter(*p, c, {0.3, 0}, {-2.0, 0}, -3.0, 1e-12);
    const Complex b = full_green_multicenter(*p, c, {-2.0, 0}, {0.3, 0}, -3.0, 1e-12);
    CHECK(std::abs(a - b) < 1e-13);
    // Weak couplings: G -> G0.
    const CenterSet weak({{-0.5, 0}, {1.0, 0}}, {1e-9, 1e-9});
    const Complex g0 = green0(*p, {0.3, 0}, {-2.0, 0}, -3.0, 1e-12).value;
    CHECK(std::abs(full_green_multicenter(*p, weak, {0.3, 0}, {-2.0, 0}, -3.0, 1e-12) - g0) < 1e-8);
    // The old level at -1 is cancelled.
    double gmin = 1e300, gmax = 0;
    for (int j = 2; j <= 6; ++j)
        for (double side : {-1.0, 1.0}) {
            const double g = std::abs(full_green_multicenter(*p, c, {0.3, 0}, {-2.0, 0}, -1.0 * (1 + side * std::pow(10.0, -j)), 1e-12));
            gmin = std::min(gmin, g);
            gmax = std::max(gmax, g);
        }
    CHECK(gmax < 10.0 * gmin);
}

TEST_CASE("center set validation") {
    CHECK_THROWS_AS(CenterSet({}, {}), SolverError);
    CHECK_THROWS_AS(CenterSet({{0, 0}}, {1.0, 2.0}), SolverError);
    CHECK_THROWS_AS(CenterSet({{0, 0}, {1e-12, 0}}, {1.0, 1.0}), SolverError);
    CHECK_THROWS_AS(CenterSet({{0, 0}}, {0.0}), SolverError);
    auto plane = make_free_plane();
    try {
        phi_matrix(*plane, CenterSet({{0, 0}}, {1.0}), -1.0, 1e-10);
        FAIL("expected DimensionMismatch");
    } catch (const SolverError& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
}

}  // TEST_SUITE
