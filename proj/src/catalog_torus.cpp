#include <algorithm>
#include <cmath>
#include <tuple>

#include "krein/catalog.hpp"
#include "krein/quadrature.hpp"

namespace krein {
namespace {

// 1 - exp(-z) without cancellation for small |z|.
Complex one_minus_exp_neg(Complex z) {
    if (std::abs(z) > 1e-2) return 1.0 - std::exp(-z);
    Complex term = z;
    Complex sum = z;
    for (int n = 2; n < 12; ++n) {
        term *= -z / double(n);
        sum += term;
    }
    return sum;
}

constexpr std::int64_t kMaxRow = 4000000;

}  // namespace

FlatTorus::FlatTorus(double L1, double L2, Units units, std::size_t mode_cap)
    : BaseProblem(units), L1_(L1), L2_(L2) {
    if (!(units.hbar > 0.0) || !(units.mass > 0.0))
        fail(ErrorCode::InvalidArgument, "hbar and mass must be positive");
    if (!(L1 > 0.0) || !(L2 > 0.0) || !std::isfinite(L1) || !std::isfinite(L2))
        fail(ErrorCode::InvalidArgument, "torus: side lengths must be positive");
    if (mode_cap < 16) fail(ErrorCode::InvalidArgument, "torus: mode cap too small");
    const double c = kinetic();
    const double g1 = 2.0 * kPi / L1;
    const double g2 = 2.0 * kPi / L2;
    // Weyl: #{E_n <= E} ~ A E / (4 pi c).
    const double ecap = 4.0 * kPi * c * double(mode_cap) / area();
    const auto m1 = std::int64_t(std::sqrt(ecap / c) / g1) + 1;
    const auto m2 = std::int64_t(std::sqrt(ecap / c) / g2) + 1;
    for (std::int64_t n1 = -m1; n1 <= m1; ++n1) {
        for (std::int64_t n2 = -m2; n2 <= m2; ++n2) {
            const double e = c * ((g1 * n1) * (g1 * n1) + (g2 * n2) * (g2 * n2));
            if (e <= ecap) modes_.push_back({n1, n2, e});
        }
    }
    std::sort(modes_.begin(), modes_.end(), [](const Mode& a, const Mode& b) {
        const double tie = 1e-12 * std::max(1.0, std::abs(a.energy));
        if (std::abs(a.energy - b.energy) > tie) return a.energy < b.energy;
        return std::tie(a.n1, a.n2) < std::tie(b.n1, b.n2);
    });
    build_levels();
    // The top shell may be cut by the lattice box; drop it.
    if (levels_.size() > 1) {
        const EnergyLevel last = levels_.back();
        levels_.pop_back();
        modes_.resize(last.first_mode);
    }
}

double FlatTorus::mode_energy(std::size_t n) const {
    if (n >= modes_.size()) fail(ErrorCode::OutOfRange, "torus: mode index beyond table");
    return modes_[n].energy;
}

std::array<std::int64_t, 2> FlatTorus::lattice(std::size_t n) const {
    if (n >= modes_.size()) fail(ErrorCode::OutOfRange, "torus: mode index beyond table");
    return {modes_[n].n1, modes_[n].n2};
}

Complex FlatTorus::mode_value(std::size_t n, Point x) const {
    if (n >= modes_.size()) fail(ErrorCode::OutOfRange, "torus: mode index beyond table");
    const double phase = 2.0 * kPi * (double(modes_[n].n1) * x.x / L1_ + double(modes_[n].n2) * x.y / L2_);
    return std::polar(1.0 / std::sqrt(area()), phase);
}

double FlatTorus::reduce(double d, double L) { return d - L * std::round(d / L); }

Complex FlatTorus::periodic_kernel(double X, Complex beta, double L, double c, int power) {
    const Complex s = std::sqrt(beta / c);
    const double ax = std::abs(X);
    const Complex ea = std::exp(-s * ax);
    const Complex eb = std::exp(-s * (L - ax));
    const Complex om = one_minus_exp_neg(s * L);
    const Complex num = ea + eb;
    const Complex den = 2.0 * c * s * om;
    if (power == 1) return num / den;
    // -(d/dbeta) of the power-1 kernel, d/dbeta = (1/(2 c s)) d/ds.
    const Complex dnum = -ax * ea - (L - ax) * eb;
    const Complex dden = 2.0 * c * om + 2.0 * c * s * L * (1.0 - om);
    const Complex dds = (dnum * den - num * dden) / (den * den);
    return -dds / (2.0 * c * s);
}

Complex FlatTorus::skipped_terms(Point x, Point y, Complex E, int power, std::size_t k) const {
    const Complex kernel = level_kernel(k, x, y);
    const Complex d = level(k).energy - E;
    return kernel / (power == 1 ? d : d * d);
}

SeriesValue FlatTorus::discrete_sum(Point x, Point y, Complex E, int power,
                                    std::optional<std::size_t> skip_level, double tol) const {
    if (power != 1 && power != 2) fail(ErrorCode::InvalidArgument, "torus: power must be 1 or 2");
    const double c = kinetic();
    double X = reduce(x.x - y.x, L1_);
    double Y = reduce(x.y - y.y, L2_);
    double La = L1_;  // kernel axis
    double Lb = L2_;  // summed axis
    if (std::abs(Y) / L2_ > std::abs(X) / L1_) {
        std::swap(X, Y);
        std::swap(La, Lb);
    }
    const bool coincident = X == 0.0 && Y == 0.0;
    if (coincident && power == 1)
        fail(ErrorCode::Divergent, "torus: G0(a,a) diverges in two dimensions");

    const double g = 2.0 * kPi / Lb;
    auto row = [&](double n) -> Complex {
        const double kb = g * n;
        return std::polar(1.0 / Lb, kb * Y) * periodic_kernel(X, c * kb * kb - E, La, c, power);
    };
    SeriesValue out;
    Complex sum = row(0.0);
    std::int64_t n = 1;
    if (!coincident) {
        // Rows decay like exp(-|k_b| |X|).
        int small = 0;
        for (; n <= kMaxRow; ++n) {
            const Complex t = row(double(n)) + row(double(-n));
            sum += t;
            const double bound = std::abs(t) / (1.0 - std::exp(-g * std::abs(X)));
            if (bound < 1e-3 * tol && g * n > std::sqrt(std::abs(E) / c)) {
                if (++small >= 3) break;
            } else {
                small = 0;
            }
        }
        out.error = n > kMaxRow ? std::abs(row(double(n))) * 2.0 * double(n) : 1e-3 * tol;
    } else {
        // Algebraic decay: direct rows to K, midpoint-rule tail integral.
        const std::int64_t K =
            std::max<std::int64_t>(2000, std::int64_t(20.0 * std::sqrt(std::abs(E) / c) / g));
        for (; n <= K; ++n) sum += row(double(n)) + row(double(-n));
        auto tail = quad::integrate_to_infinity([&](double t) { return 2.0 * row(t); }, K + 0.5,
                                                1e-3 * tol, 1e-12);
        sum += tail.value;
        // Midpoint-rule remainder ~ f'(K)/24 per side.
        const Complex df = (row(K + 1.0) - row(double(K))) ;
        out.error = tail.error + std::abs(df) / 12.0;
    }
    out.terms = std::size_t(n);
    out.value = sum;
    if (skip_level) out.value -= skipped_terms(x, y, E, power, *skip_level);
    return out;
}

SeriesValue FlatTorus::subtracted_discrete_diagonal(Point a, Complex E, double mu2,
                                                    std::optional<std::size_t> skip_level,
                                                    double tol) const {
    if (!(mu2 > 0.0)) fail(ErrorCode::InvalidArgument, "torus: mu2 must be positive");
    const double c = kinetic();
    const double g = 2.0 * kPi / L2_;
    auto row = [&](double n) -> Complex {
        const double kb = g * n;
        const double b0 = c * kb * kb;
        return (periodic_kernel(0.0, b0 - E, L1_, c, 1) - periodic_kernel(0.0, b0 + mu2, L1_, c, 1)) / L2_;
    };
    const double escale = std::max(std::abs(E), mu2);
    const std::int64_t K = std::max<std::int64_t>(2000, std::int64_t(20.0 * std::sqrt(escale / c) / g));
    Complex sum = row(0.0);
    for (std::int64_t n = 1; n <= K; ++n) sum += row(double(n)) + row(double(-n));
    auto tail = quad::integrate_to_infinity([&](double t) { return 2.0 * row(t); }, K + 0.5,
                                            1e-3 * tol, 1e-12);
    sum += tail.value;
    SeriesValue out;
    out.value = sum;
    out.error = tail.error + std::abs(row(K + 1.0) - row(double(K))) / 12.0;
    out.terms = std::size_t(K);
    if (skip_level) {
        const EnergyLevel lvl = level(*skip_level);
        const double dens = level_density(*skip_level, a);
        out.value -= dens * (1.0 / (lvl.energy - E) - 1.0 / (lvl.energy + mu2));
    }
    return out;
}

SeriesValue FlatTorus::shell_subtracted_diagonal(Complex E, double mu2, double cutoff) const {
    if (modes_.empty() || cutoff > modes_.back().energy)
        fail(ErrorCode::OutOfRange, "torus: cutoff beyond the mode table");
    SeriesValue out;
    const double dens = 1.0 / area();
    for (const auto& m : modes_) {
        if (m.energy > cutoff) break;
        out.value += dens * (1.0 / (m.energy - E) - 1.0 / (m.energy + mu2));
        ++out.terms;
    }
    out.value += std::log((cutoff + mu2) / (cutoff - E)) / (4.0 * kPi * kinetic());
    // Lattice-point fluctuations around the Weyl density.
    out.error = std::abs(E + mu2) / (cutoff * std::sqrt(cutoff));
    return out;
}

double FlatTorus::truncated_diagonal(double E, double cutoff, std::optional<std::size_t> skip_level) const {
    if (modes_.empty() || cutoff > modes_.back().energy)
        fail(ErrorCode::OutOfRange, "torus: cutoff beyond the mode table");
    std::size_t skip_lo = modes_.size();
    std::size_t skip_hi = modes_.size();
    if (skip_level) {
        const EnergyLevel lvl = level(*skip_level);
        skip_lo = lvl.first_mode;
        skip_hi = lvl.first_mode + lvl.multiplicity;
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < modes_.size() && modes_[n].energy <= cutoff; ++n) {
        if (n >= skip_lo && n < skip_hi) continue;
        sum += 1.0 / (area() * (modes_[n].energy - E));
    }
    return sum;
}

}  // namespace krein
