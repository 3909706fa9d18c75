#include <cmath>
#include <vector>

#include "doctest.h"
#include "krein/catalog.hpp"
#include "krein/greens.hpp"
#include "krein/special.hpp"
#include "oracles.hpp"

using namespace krein;

TEST_SUITE("spectral-core") {

TEST_CASE("free line: kernel, channel and boundary value") {
    auto p = make_free_line();
    CHECK(p->dimension() == 1);
    CHECK(p->level_count() == 0);
    CHECK(p->closed_green({0, 0}, {0, 0}, Complex(-1.0, 0.0)).real() == doctest::Approx(0.5).epsilon(1e-15));
    for (double k : {0.5, 1.0, 2.0, 7.0}) CHECK(std::abs(eval_channel(*p, 0, k, {0, 0}) - 1.0) < 1e-15);
    // G0(E + i0) at k = 1, x = y: i m / (hbar^2 k) = i / 2.
    const Complex g = p->closed_green_boundary({0.3, 0}, {0.3, 0}, 1.0, Side::Plus);
    CHECK(std::abs(g - Complex(0.0, 0.5)) < 1e-15);
    // Other units: hbar = 1, m = 1.
    auto q = make_free_line(Units{1.0, 1.0});
    for (double d : {0.0, 0.4, 3.0})
        CHECK(q->closed_green({d, 0}, {0, 0}, Complex(-0.7, 0.0)).real() ==
              doctest::Approx(oracle::free_line_kernel(d, 0.0, -0.7, 0.5)).epsilon(1e-14));
}

TEST_CASE("reflectionless: level, mode and parameter checks") {
    auto p = make_reflectionless(1.0);
    REQUIRE(p->level_count() == 1);
    CHECK(p->level(0).energy == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(eval_level(*p, 0, {0, 0}).real() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
    auto q = make_reflectionless(2.0, Units{1.0, 1.0});
    CHECK(q->level(0).energy == doctest::Approx(-2.0).epsilon(1e-14));  // -hbar^2 kappa^2 / 2m
    CHECK_THROWS_AS(make_reflectionless(0.0), SolverError);
    CHECK_THROWS_AS(make_reflectionless(-1.0), SolverError);
    CHECK_THROWS_AS(eval_level(*p, 1, {0, 0}), SolverError);
}

TEST_CASE("reflectionless closed form matches the eigenfunction expansion") {
    auto p = make_reflectionless(1.0);
    const Complex closed = green0(*p, {0, 0}, {0, 0}, -4.0, 1e-12).value;
    GreenOptions force;
    force.force_expansion = true;
    const Complex expanded = green0(*p, {0, 0}, {0, 0}, -4.0, 1e-12, force).value;
    CHECK(std::abs(closed - expanded) < 1e-6);
    CHECK(closed.real() == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("closed form and expansion agree at 20 random triples") {
    oracle::Draws draw(20240611);
    for (ProblemPtr p : {make_free_line(), make_reflectionless(1.0), make_reflectionless(1.7, Units{1.0, 1.0})}) {
        GreenOptions force;
        force.force_expansion = true;
        const double bottom = p->level_count() ? p->level(0).energy : 0.0;
        for (int i = 0; i < 20; ++i) {
            const Point x{draw(-3, 3), 0};
            const Point y{draw(-3, 3), 0};
            double E = bottom - draw(0.05, 5.0);
            if (i % 3 == 0 && p->level_count()) E = draw(bottom + 0.05, -0.05);  // between level and edge
            const Complex a = green0(*p, x, y, E, 1e-9).value;
            const Complex b = green0(*p, x, y, E, 1e-9, force).value;
            CHECK(std::abs(a - b) < 1e-7 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST_CASE("oscillator: levels, parity and constructor checks") {
    auto p = make_harmonic_oscillator(1.0, Units{1.0, 1.0});
    CHECK(p->level(3).energy == doctest::Approx(3.5).epsilon(1e-15));
    CHECK(std::norm(eval_level(*p, 0, {0, 0})) == doctest::Approx(1.0 / std::sqrt(oracle::pi)).epsilon(1e-14));
    CHECK(std::abs(eval_level(*p, 1, {0, 0})) == 0.0);
    CHECK(p->continuum_infimum() == std::numeric_limits<double>::infinity());
    CHECK_FALSE(p->has_closed_form());
    CHECK_THROWS_AS(make_harmonic_oscillator(0.0), SolverError);
}

TEST_CASE("flat torus: enumeration, multiplicities and flat densities") {
    auto p = make_flat_torus(2 * oracle::pi, 2 * oracle::pi);
    CHECK(p->level(0).energy == 0.0);
    CHECK(p->level(0).multiplicity == 1);
    CHECK(p->level(1).energy == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p->level(1).multiplicity == 4);
    CHECK(p->level(2).energy == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p->level(2).multiplicity == 4);
    CHECK(p->level(3).multiplicity == 4);  // |n|^2 = 4
    CHECK(p->level(4).multiplicity == 8);  // |n|^2 = 5
    const double flat = 1.0 / (4.0 * oracle::pi * oracle::pi);
    for (std::size_t n : {0u, 3u, 17u, 200u})
        CHECK(std::norm(p->mode_value(n, {0.37, 5.1})) == doctest::Approx(flat).epsilon(1e-13));
    CHECK(std::abs(eval_level(*p, 0, {1.0, 2.0}) - 1.0 / (2.0 * oracle::pi)) < 1e-15);
    // Energies non-decreasing over the enumerated modes.
    for (std::size_t n = 1; n < p->mode_count(); ++n) REQUIRE(p->mode_energy(n) >= p->mode_energy(n - 1));
    CHECK_THROWS_AS(make_flat_torus(0.0, 1.0), SolverError);

    auto r = make_flat_torus(2.0, 3.0, Units{1.0, 1.0});
    const double c = 0.5;
    CHECK(r->level(1).energy == doctest::Approx(c * std::pow(2 * oracle::pi / 3.0, 2)).epsilon(1e-14));
}

TEST_CASE("free plane: logarithmic singularity and K0") {
    auto p = make_free_plane();
    const double r = 1e-6;
    const double g = p->closed_green({0, 0}, {r, 0}, Complex(-1.0, 0.0)).real();
    const double lead = -std::log(r) / (2.0 * oracle::pi);
    CHECK(std::abs(g / lead - 1.0) < 0.01);
    CHECK(p->closed_green({1, 2}, {0.3, -0.4}, -0.8) == p->closed_green({0.3, -0.4}, {1, 2}, -0.8));
    CHECK(special::bessel_k0(1.0) == doctest::Approx(0.4210244382407083).epsilon(1e-14));
    for (double x : {1e-6, 0.01, 0.5, 1.99, 2.0, 2.01, 5.0, 19.9, 20.0, 35.0, 120.0}) {
        CHECK(special::bessel_k0(x) == doctest::Approx(std::cyl_bessel_k(0.0, x)).epsilon(1e-13));
        CHECK(special::bessel_k1(x) == doctest::Approx(std::cyl_bessel_k(1.0, x)).epsilon(1e-13));
        if (x < 600) CHECK(special::bessel_i0(x) == doctest::Approx(std::cyl_bessel_i(0.0, x)).epsilon(1e-13));
    }
    for (double x : {0.1, 1.0, 3.0})
        CHECK(special::bessel_k0_regular(x) ==
              doctest::Approx(std::cyl_bessel_k(0.0, x) + (std::log(x / 2) + kEulerGamma) * std::cyl_bessel_i(0.0, x))
                  .epsilon(1e-12));
}

TEST_CASE("discrete eigenfunctions are orthonormal") {
    auto osc = make_harmonic_oscillator(1.3, Units{1.0, 1.0});
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i; j < 6; ++j) {
            const double ip = oracle::simpson(
                [&](double x) { return (std::conj(osc->mode_value(i, {x, 0})) * osc->mode_value(j, {x, 0})).real(); },
                -12, 12, 2400);
            CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-6);
        }
    auto refl = make_reflectionless(1.4);
    const double norm = oracle::simpson([&](double x) { return std::norm(refl->mode_value(0, {x, 0})); }, -30, 30, 6000);
    CHECK(std::abs(norm - 1.0) < 1e-6);

    // Torus: the periodic trapezoid rule is exact for trigonometric polynomials.
    auto tor = make_flat_torus(2.0, 3.0);
    const int n = 64;
    for (std::size_t i : {0u, 1u, 5u, 9u})
        for (std::size_t j : {0u, 1u, 5u, 9u}) {
            Complex s{};
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v) {
                    const Point x{2.0 * u / n, 3.0 * v / n};
                    s += std::conj(tor->mode_value(i, x)) * tor->mode_value(j, x);
                }
            s *= 6.0 / (n * n);
            CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-12);
        }
}

TEST_CASE("reflectionless channels resynthesize a Gaussian") {
    // f = phi0 <phi0, f> + int w chi_k <chi_k, f> dk, checked in L2.
    auto p = make_reflectionless(1.0);
    auto f = [](double x) { return std::exp(-x * x) * (1.0 + 0.3 * x); };
    const int nx = 400;
    const double X = 8.0;
    const double hx = 2 * X / nx;
    std::vector<double> xs(nx + 1);
    std::vector<double> wx(nx + 1);
    for (int i = 0; i <= nx; ++i) {
        xs[i] = -X + i * hx;
        wx[i] = hx / 3.0 * (i == 0 || i == nx ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    Complex c0{};
    for (int i = 0; i <= nx; ++i) c0 += wx[i] * std::conj(p->mode_value(0, {xs[i], 0})) * f(xs[i]);
    const int nk = 600;
    const double K = 14.0;
    const double hk = 2 * K / nk;
    const auto& ch = *p->channels().front();
    std::vector<double> ks(nk + 1);
    std::vector<Complex> ck(nk + 1);
    for (int j = 0; j <= nk; ++j) {
        ks[j] = -K + j * hk;
        Complex s{};
        for (int i = 0; i <= nx; ++i) s += wx[i] * std::conj(ch.eigenfunction(ks[j], {xs[i], 0})) * f(xs[i]);
        ck[j] = s * ch.measure_weight(ks[j]) * (hk / 3.0 * (j == 0 || j == nk ? 1.0 : (j % 2 ? 4.0 : 2.0)));
    }
    double err2 = 0.0;
    for (int i = 0; i <= nx; i += 2) {
        Complex s = c0 * p->mode_value(0, {xs[i], 0});
        for (int j = 0; j <= nk; ++j) s += ck[j] * ch.eigenfunction(ks[j], {xs[i], 0});
        err2 += 2 * hx * std::norm(s - f(xs[i]));
    }
    CHECK(std::sqrt(err2) <= 1e-4);
}

TEST_CASE("decay rate branch") {
    CHECK(std::abs(decay_rate(Complex(-4.0, 0.0), 1.0) - 2.0) < 1e-15);
    const Complex q = decay_rate(Complex(1.0, 1e-9), 1.0);
    CHECK(q.real() > 0.0);
    CHECK(q.imag() == doctest::Approx(-1.0).epsilon(1e-8));  // q -> -i k above the cut
}

}  // TEST_SUITE
