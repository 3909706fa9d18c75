#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "krein/catalog.hpp"
#include "krein/renorm.hpp"
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

}  // namespace

TEST_SUITE("renorm") {

TEST_CASE("subtracted torus diagonal matches a lattice-shell sum") {
    const double L = 2 * oracle::pi;
    auto p = make_flat_torus(L, L);
    const double d0 = 1.0 / (L * L);
    for (double mu2 : {0.5, 1.0, 3.0}) {
        // Level 0 is at E = 0; S_k=0 regular part = C_R - d0 / mu2.
        const double ref = oracle::torus_ground_subtracted(L, L, 1.0, mu2, 4e4) - d0 / mu2;
        const double got = subtracted_regular(*p, 0, {0.7, 1.9}, mu2, 1e-11).value.real();
        CHECK(got == doctest::Approx(ref).epsilon(1e-5));
    }
    // S(-mu2) = 0 by construction, S increasing in E below the spectrum.
    CHECK(std::abs(subtracted_diagonal(*p, {0.7, 1.9}, -1.0, 1.0, 1e-12).value) < 1e-13);
    const double s1 = subtracted_diagonal(*p, {0.7, 1.9}, -2.0, 1.0, 1e-12).value.real();
    const double s2 = subtracted_diagonal(*p, {0.7, 1.9}, -0.5, 1.0, 1e-12).value.real();
    CHECK(s1 < 0.0);
    CHECK(s2 > 0.0);
}

TEST_CASE("renormalization condition: infinite coupling binds at -mu2") {
    const double L = 2 * oracle::pi;
    auto p = make_flat_torus(L, L);
    for (double mu2 : {0.3, 1.0, 2.5}) {
        const RenormalizedPerturbation rp{{1.0, 1.0}, 0.0, mu2};
        const auto e = energies(find_bound_states_renormalized(*p, rp, {-10.0, 0.5}, 1e-13));
        REQUIRE_FALSE(e.empty());
        CHECK(std::abs(e.front() + mu2) <= 1e-9);
        CHECK(std::abs(phi_renormalized(*p, rp, -mu2, 1e-13)) < 1e-13);
    }
    // Free plane: the same condition with the closed-form kernel.
    auto plane = make_free_plane();
    const RenormalizedPerturbation rp{{0.0, 0.0}, 0.0, 1.0};
    const auto e = energies(find_bound_states_renormalized(*plane, rp, {-10.0, 0.0}, 1e-13));
    REQUIRE(e.size() == 1);
    CHECK(std::abs(e[0] + 1.0) <= 1e-9);
    // Free plane S(E) = -(1 / 4 pi c) ln(-E / mu2).
    const double s = subtracted_diagonal(*plane, {0, 0}, -3.0, 1.0, 1e-12).value.real();
    CHECK(s == doctest::Approx(-std::log(3.0) / (4 * oracle::pi)).epsilon(1e-10));
}

TEST_CASE("coupling flow leaves the spectrum invariant") {
    const double L = 2 * oracle::pi;
    auto p = make_flat_torus(L, L);
    const Point a{1.0, 1.0};
    const double inv = 0.4;
    const auto ref = energies(find_bound_states_renormalized(*p, {a, inv, 1.0}, {-10.0, 2.5}, 1e-13));
    REQUIRE(ref.size() >= 2);
    for (double mu2 : {0.25, 2.0, 7.0}) {
        const double flowed = coupling_flow(*p, a, inv, 1.0, mu2);
        const auto e = energies(find_bound_states_renormalized(*p, {a, flowed, mu2}, {-10.0, 2.5}, 1e-13));
        REQUIRE(e.size() == ref.size());
        for (std::size_t i = 0; i < e.size(); ++i) CHECK(std::abs(e[i] - ref[i]) <= 1e-8);
        // Phi_R agrees pointwise.
        for (double E : {-3.0, -0.4, 0.6})
            CHECK(std::abs(phi_renormalized(*p, {a, flowed, mu2}, E, 1e-13) - phi_renormalized(*p, {a, inv, 1.0}, E, 1e-13)) <
                  1e-10);
    }
    // Round trip.
    CHECK(coupling_flow(*p, a, coupling_flow(*p, a, inv, 1.0, 3.0), 3.0, 1.0) == doctest::Approx(inv).epsilon(1e-12));
    // Free plane flow: 1/alpha_R shifts by (1 / 4 pi c) ln(mu2' / mu2).
    auto plane = make_free_plane();
    CHECK(coupling_flow(*plane, {0, 0}, inv, 1.0, 4.0) ==
          doctest::Approx(inv + std::log(4.0) / (4 * oracle::pi)).epsilon(1e-10));
}

TEST_CASE("renormalized Green's function cancels the poles it should") {
    const double L = 2 * oracle::pi;
    auto p = make_flat_torus(L, L);
    const Point a{0.3, 0.7};
    const RenormalizedPerturbation rp{a, 0.2, 1.0};
    // Level 0 is simple, so G has no pole at E = 0 for any (x, y).
    // Level 1 is degenerate; y antipodal to a removes the remainder residue.
    // Random (x, y) can put a zero of the finite limit near E_k, so the check there is
    // continuity across E_k while G0 jumps by twice its residue over the offset.
    oracle::Draws draw(3);
    for (int i = 0; i < 3; ++i) {
        const Point x{draw(0, L), draw(0, L)};
        for (double Ek : {0.0, 1.0}) {
            const Point y = Ek == 0.0 ? Point{draw(0, L), draw(0, L)} : Point{a.x + L / 2, a.y + L / 2};
            const double scale = Ek == 0.0 ? 1.0 : Ek;
            auto G = [&](double E) { return full_green_renormalized(*p, rp, x, y, E, 1e-12); };
            double gmin = 1e300, gmax = 0;
            for (int j = 2; j <= 6; ++j)
                for (double side : {-1.0, 1.0}) {
                    const double g = std::abs(G(Ek + side * scale * std::pow(10.0, -j)));
                    gmin = std::min(gmin, g);
                    gmax = std::max(gmax, g);
                }
            const double d = 1e-6 * scale;
            CHECK(std::abs(G(Ek + d) - G(Ek - d)) < 1e-4 * gmax);
            const Complex g0jump = green0(*p, x, y, Ek + d, 1e-12).value - green0(*p, x, y, Ek - d, 1e-12).value;
            CHECK(std::abs(g0jump) > 1e3 * gmax);
            if (Ek != 0.0) CHECK(gmax < 10.0 * gmin);
        }
    }
}

TEST_CASE("renormalized argument errors") {
    auto p = make_flat_torus(2 * oracle::pi, 2 * oracle::pi);
    CHECK_THROWS_AS(phi_renormalized(*p, {{1, 1}, 0.0, -1.0}, -2.0, 1e-10), SolverError);
    CHECK_THROWS_AS(phi_renormalized(*p, {{1, 1}, std::nan(""), 1.0}, -2.0, 1e-10), SolverError);
    CHECK_THROWS_AS(subtracted_regular(*p, 0, {1, 1}, 1.0, 1e-10, 3), SolverError);
    CHECK_THROWS_AS(coupling_flow(*p, {1, 1}, 0.0, 1.0, -1.0), SolverError);
}

}  // TEST_SUITE
