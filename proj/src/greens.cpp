#include "krein/greens.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "krein/quadrature.hpp"

namespace krein {
namespace {

constexpr double kGuard = 1e-8;
constexpr int kContourNodes = 64;

double level_spacing(const BaseProblem& problem, std::size_t k) {
    const double e = problem.level(k).energy;
    double gap = std::numeric_limits<double>::infinity();
    if (k > 0) gap = std::min(gap, e - problem.level(k - 1).energy);
    if (k + 1 < problem.level_count()) gap = std::min(gap, problem.level(k + 1).energy - e);
    return gap;
}

bool near_cut(const BaseProblem& problem, Complex E) {
    const double inf = problem.continuum_infimum();
    return E.real() >= inf && std::abs(E.imag()) < 1e-6 * std::max(1.0, std::abs(E));
}

Complex analytic_green(const BaseProblem& problem, Point x, Point y, Complex E, int power, double tol,
                       double* error) {
    if (problem.has_closed_form()) {
        if (error) *error = 0.0;
        return power == 1 ? problem.closed_green(x, y, E) : problem.closed_green_derivative(x, y, E);
    }
    SeriesValue d = problem.discrete_sum(x, y, E, power, std::nullopt, 0.5 * tol);
    Complex value = d.value;
    double err = d.error;
    if (!problem.channels().empty()) {
        GreenEvaluation c = continuum_integral(problem, x, y, E, power, 0.5 * tol);
        value += c.value;
        err += c.quadrature_error;
    }
    if (error) *error = err;
    return value;
}

GreenEvaluation expansion(const BaseProblem& problem, Point x, Point y, Complex E, int power,
                          double tol) {
    GreenEvaluation out;
    out.method = GreenMethod::Expansion;
    SeriesValue d = problem.discrete_sum(x, y, E, power, std::nullopt, 0.5 * tol);
    out.value = d.value;
    out.quadrature_error = d.error;
    out.truncation_index = d.terms;
    if (!problem.channels().empty()) {
        GreenEvaluation c = continuum_integral(problem, x, y, E, power, 0.5 * tol);
        out.value += c.value;
        out.quadrature_error += c.quadrature_error;
    }
    return out;
}

// Max |g| over a few points near k to avoid sampling an accidental zero.
template <class G>
double envelope_at(G&& g, double k) {
    double m = 0.0;
    for (double s : {1.0, 1.013, 1.031, 1.057}) m = std::max({m, std::abs(g(s * k)), std::abs(g(-s * k))});
    return m;
}

}  // namespace

double pole_guard(const BaseProblem& problem, std::size_t k) {
    const double gap = level_spacing(problem, k);
    return kGuard * std::max(1.0, std::isfinite(gap) ? gap : 1.0);
}

namespace {

// A level whose modes vanish at x or y leaves no residue in G0(x, y | E).
bool silent_level(const BaseProblem& problem, std::size_t k, const Point* x, const Point* y) {
    if (!x || !y) return false;
    const EnergyLevel lvl = problem.level(k);
    double peak = 0.0;
    for (std::size_t n = lvl.first_mode; n < lvl.first_mode + lvl.multiplicity; ++n)
        peak = std::max(peak, problem.mode_peak_density(n));
    return problem.level_density(k, *x) < 1e-24 * peak || problem.level_density(k, *y) < 1e-24 * peak;
}

void guard_impl(const BaseProblem& problem, Complex E, const Point* x, const Point* y) {
    if (!std::isfinite(E.real()) || !std::isfinite(E.imag()))
        fail(ErrorCode::InvalidArgument, "energy must be finite");
    const std::size_t count = problem.level_count();
    if (count == 0) return;
    // Levels are sorted; only the two neighbours of Re E matter.
    std::size_t hi = 0;
    {
        std::size_t lo = 0;
        std::size_t top = count;
        if (problem.discrete_infinite()) {
            // Exponential search for an upper bracket.
            top = 1;
            while (top < count && problem.level(top - 1).energy <= E.real()) top = std::min(count, 2 * top);
        }
        while (lo < top) {
            const std::size_t mid = (lo + top) / 2;
            if (problem.level(mid).energy <= E.real()) lo = mid + 1;
            else top = mid;
        }
        hi = lo;
    }
    for (std::size_t k : {hi == 0 ? std::size_t(0) : hi - 1, hi}) {
        if (k >= count) continue;
        if (std::abs(E - problem.level(k).energy) < pole_guard(problem, k) && !silent_level(problem, k, x, y))
            fail(ErrorCode::PoleProximity,
                 "E = " + std::to_string(E.real()) + " is inside the guard band of level " + std::to_string(k));
    }
}

}  // namespace

void check_pole_guard(const BaseProblem& problem, Complex E) { guard_impl(problem, E, nullptr, nullptr); }

void check_pole_guard(const BaseProblem& problem, Complex E, Point x, Point y) { guard_impl(problem, E, &x, &y); }

GreenEvaluation green0(const BaseProblem& problem, Point x, Point y, Complex E, double tol,
                       GreenOptions options) {
    if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be positive");
    check_pole_guard(problem, E, x, y);
    const double inf = problem.continuum_infimum();
    const bool on_cut = E.imag() == 0.0 && E.real() >= inf;
    if (problem.has_closed_form() && !options.force_expansion) {
        GreenEvaluation out;
        out.method = GreenMethod::ClosedForm;
        if (on_cut) {
            if (!problem.has_boundary_values() || E.real() == inf)
                fail(ErrorCode::CutViolation, problem.label() + ": real E on the continuum");
            out.value = problem.closed_green_boundary(x, y, E.real(), Side::Plus);
        } else {
            out.value = problem.closed_green(x, y, E);
        }
        return out;
    }
    if (near_cut(problem, E))
        fail(ErrorCode::CutViolation, problem.label() + ": expansion route needs E away from the continuum");
    return expansion(problem, x, y, E, 1, tol);
}

Complex green0_boundary(const BaseProblem& problem, Point x, Point y, double E, Side side) {
    if (!problem.has_boundary_values())
        fail(ErrorCode::Unsupported, problem.label() + " has no closed-form boundary values");
    if (E == problem.continuum_infimum())
        fail(ErrorCode::CutViolation, "boundary value requested at the threshold");
    return problem.closed_green_boundary(x, y, E, side);
}

GreenEvaluation green0_energy_derivative(const BaseProblem& problem, Point x, Point y, Complex E,
                                         double tol, GreenOptions options) {
    check_pole_guard(problem, E, x, y);
    if (E.imag() == 0.0 && E.real() >= problem.continuum_infimum())
        fail(ErrorCode::CutViolation, problem.label() + ": derivative requested on the continuum");
    if (problem.has_closed_form() && !options.force_expansion) {
        GreenEvaluation out;
        out.value = problem.closed_green_derivative(x, y, E);
        return out;
    }
    if (near_cut(problem, E))
        fail(ErrorCode::CutViolation, problem.label() + ": expansion route needs E away from the continuum");
    return expansion(problem, x, y, E, 2, tol);
}

double green0_derivative(const BaseProblem& problem, Point a, double E, double tol) {
    return green0_energy_derivative(problem, a, a, Complex(E, 0.0), tol).value.real();
}

GreenEvaluation continuum_integral(const BaseProblem& problem, Point x, Point y, Complex E, int power,
                                   double tol) {
    if (power != 1 && power != 2) fail(ErrorCode::InvalidArgument, "continuum power must be 1 or 2");
    GreenEvaluation out;
    out.method = GreenMethod::Expansion;
    for (const auto& ch : problem.channels()) {
        const double c = ch->kinetic();
        const double w_inf = ch->asymptotic_weight();
        const double delta = x.x - y.x;
        const Complex q = decay_rate(E, c);
        auto f = [&](double k) -> Complex {
            const Complex d = ch->dispersion(k) - E;
            const Complex num = ch->measure_weight(k) * ch->eigenfunction(k, x) * std::conj(ch->eigenfunction(k, y));
            return power == 1 ? num / d : num / (d * d);
        };
        // Power 1: subtract the free plane-wave term whose integral is known.
        auto g = [&](double k) -> Complex {
            if (power == 2) return f(k);
            return f(k) - w_inf * std::exp(Complex(0.0, k * delta)) / (c * k * k - E);
        };
        Complex analytic{};
        if (power == 1) analytic = w_inf * kPi * std::exp(-q * std::abs(delta)) / (c * q);

        // Truncate at K where the algebraic tail drops below tol / 4.
        const double decay_pow = power == 1 ? 2.0 : 3.0;
        double K = 64.0 * std::max(1.0, std::abs(q));
        double tail = 0.0;
        for (int it = 0; it < 40; ++it) {
            tail = 2.0 * K * envelope_at(g, K) / decay_pow;
            if (tail <= 0.25 * tol || K > 1e7) break;
            K *= 2.0;
        }
        // Panels resolve the exp(ik delta) oscillation and any near-cut peak.
        const double width = std::min(K / 8.0, std::max(0.25, kPi / std::max(std::abs(delta), 1e-300)));
        const auto panels = std::min<std::size_t>(std::size_t(2.0 * K / width) + 1, 200000);
        std::vector<double> breaks;
        breaks.reserve(panels + 3);
        for (std::size_t i = 0; i <= panels; ++i) breaks.push_back(-K + 2.0 * K * double(i) / double(panels));
        if (E.real() > ch->infimum()) {
            const double kr = std::sqrt((E.real() - ch->infimum()) / c);
            if (kr < K) {
                breaks.push_back(kr);
                breaks.push_back(-kr);
            }
        }
        auto r = quad::integrate(g, breaks, 0.25 * tol, 1e-14, panels + 200000);
        out.value += r.value + analytic;
        out.quadrature_error += r.error + tail;
        if (!r.converged) out.quadrature_error += std::abs(r.value) * 1e-6;
        out.truncation_index = std::max(out.truncation_index, r.evaluations);
    }
    return out;
}

double regular_contour_radius(const BaseProblem& problem, std::size_t k) {
    const double e = problem.level(k).energy;
    double dist = level_spacing(problem, k);
    dist = std::min(dist, problem.continuum_infimum() - e);
    if (!std::isfinite(dist)) dist = std::max(1.0, std::abs(e));
    return 0.5 * dist;
}

GreenEvaluation regular_part(const BaseProblem& problem, std::size_t k, Point x, Point y, int power,
                             double tol, RegularMethod method) {
    if (power != 1 && power != 2) fail(ErrorCode::InvalidArgument, "regular part power must be 1 or 2");
    if (k >= problem.level_count()) fail(ErrorCode::OutOfRange, "level index " + std::to_string(k));
    if (method == RegularMethod::Automatic) {
        if (problem.has_closed_form()) method = RegularMethod::Contour;
        else if (problem.direct_skip_supported()) method = RegularMethod::Expansion;
        else method = RegularMethod::Contour;
    }
    const double ek = problem.level(k).energy;
    GreenEvaluation out;
    if (method == RegularMethod::Expansion) {
        out.method = GreenMethod::Expansion;
        SeriesValue d = problem.discrete_sum(x, y, Complex(ek, 0.0), power, k, 0.5 * tol);
        out.value = d.value;
        out.quadrature_error = d.error;
        out.truncation_index = d.terms;
        if (!problem.channels().empty()) {
            GreenEvaluation c = continuum_integral(problem, x, y, Complex(ek, 0.0), power, 0.5 * tol);
            out.value += c.value;
            out.quadrature_error += c.quadrature_error;
        }
        return out;
    }
    // Contour mean of G - residue / (E_k - E) on |E - E_k| = rho.
    const Complex residue = problem.level_kernel(k, x, y);
    const double rho = regular_contour_radius(problem, k);
    double err_sum = 0.0;
    auto regular = [&](Complex E) {
        double err = 0.0;
        const Complex g = analytic_green(problem, x, y, E, 1, tol, &err);
        err_sum += err;
        return g - residue / (ek - E);
    };
    out.method = problem.has_closed_form() ? GreenMethod::ClosedForm : GreenMethod::Expansion;
    out.value = contour_coefficient(regular, ek, rho, power - 1, kContourNodes, &out.quadrature_error);
    out.quadrature_error += err_sum / kContourNodes;
    out.truncation_index = kContourNodes;
    return out;
}

Complex contour_coefficient(const std::function<Complex(Complex)>& f, double center, double rho, int order,
                            int nodes, double* error) {
    // Taylor coefficient c_order = (1/(2 pi)) int f(z0 + rho e^{it}) e^{-i order t} dt / rho^order
    Complex full{};
    Complex half{};
    for (int j = 0; j < nodes; ++j) {
        const double t = 2.0 * kPi * j / nodes;
        const Complex u = std::polar(1.0, t);
        const Complex v = f(center + rho * u) * std::pow(std::conj(u), order);
        full += v;
        if (j % 2 == 0) half += v;
    }
    full /= double(nodes);
    half /= double(nodes / 2);
    const double scale = std::pow(rho, order);
    if (error) *error = std::abs(full - half) / scale;
    return full / scale;
}

Complex spectral_density(const BaseProblem& problem, Point x, Point y, double E) {
    Complex rho{};
    for (const auto& ch : problem.channels()) {
        if (!(E > ch->infimum())) continue;
        const double k0 = std::sqrt((E - ch->infimum()) / ch->kinetic());
        for (double k : {k0, -k0})
            rho += ch->measure_weight(k) * ch->eigenfunction(k, x) * std::conj(ch->eigenfunction(k, y)) /
                   std::abs(ch->dispersion_slope(k));
    }
    return rho;
}

}  // namespace krein
