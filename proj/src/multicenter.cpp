#include "krein/multicenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace krein {

CenterSet::CenterSet(std::vector<Point> points, std::vector<double> alphas)
    : points_(std::move(points)), alphas_(std::move(alphas)) {
    if (points_.empty()) fail(ErrorCode::InvalidArgument, "center set is empty");
    if (points_.size() != alphas_.size()) fail(ErrorCode::InvalidArgument, "one coupling per center");
    for (double a : alphas_)
        if (a == 0.0 || !std::isfinite(a)) fail(ErrorCode::InvalidArgument, "couplings must be finite and nonzero");
    for (std::size_t i = 0; i < points_.size(); ++i)
        for (std::size_t j = i + 1; j < points_.size(); ++j)
            if (distance(points_[i], points_[j]) < kMinSeparation)
                fail(ErrorCode::InvalidArgument, "centers " + std::to_string(i) + " and " + std::to_string(j) +
                                                     " are closer than the minimum separation");
}

CenterSet CenterSet::prefix(std::size_t n) const {
    if (n == 0 || n > size()) fail(ErrorCode::OutOfRange, "prefix length out of range");
    return CenterSet({points_.begin(), points_.begin() + n}, {alphas_.begin(), alphas_.begin() + n});
}

namespace {

void validate(const BaseProblem& problem, const CenterSet& centers) {
    if (!problem.diagonal_finite())
        fail(ErrorCode::DimensionMismatch, problem.label() + ": G0(a,a) diverges; point centers need renormalization");
    if (problem.dimension() == 1)
        for (const Point& p : centers.points())
            if (p.y != 0.0) fail(ErrorCode::DimensionMismatch, "center has a second coordinate in a 1D problem");
}

Eigen::MatrixXcd green_matrix(const BaseProblem& problem, const CenterSet& centers, Complex E, double tol) {
    const std::size_t n = centers.size();
    Eigen::MatrixXcd g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            g(i, j) = green0(problem, centers.point(i), centers.point(j), E, tol).value;
            // Hermitian for real E; symmetric in the arguments otherwise only for real eigenfunctions.
            g(j, i) = E.imag() == 0.0 ? std::conj(g(i, j))
                                      : green0(problem, centers.point(j), centers.point(i), E, tol).value;
        }
    return g;
}

Eigen::MatrixXcd principal(const BaseProblem& problem, const CenterSet& centers, Complex E, double tol) {
    Eigen::MatrixXcd m = -green_matrix(problem, centers, E, tol);
    for (std::size_t i = 0; i < centers.size(); ++i) m(i, i) += 1.0 / centers.alpha(i);
    return m;
}

struct Spectrum {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
    int negative = 0;
};

Spectrum hermitian_spectrum(const BaseProblem& problem, const CenterSet& centers, double E, double tol) {
    Eigen::MatrixXcd m = principal(problem, centers, Complex(E, 0.0), tol);
    const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Spectrum s;
    s.values = es.eigenvalues();
    s.vectors = es.eigenvectors();
    for (Eigen::Index i = 0; i < s.values.size(); ++i)
        if (s.values(i) < 0.0) ++s.negative;
    return s;
}

struct CenterLevel {
    std::size_t level = 0;
    double energy = 0.0;
    double guard = 0.0;
    std::size_t multiplicity = 1;
    std::size_t rank = 0;  // rank of phi_n(a_i) over the level's modes
};

std::size_t level_rank(const BaseProblem& problem, const CenterSet& centers, const EnergyLevel& lvl) {
    Eigen::MatrixXcd v(centers.size(), lvl.multiplicity);
    double peak = 0.0;
    for (std::size_t m = 0; m < lvl.multiplicity; ++m) {
        peak = std::max(peak, problem.mode_peak_density(lvl.first_mode + m));
        for (std::size_t i = 0; i < centers.size(); ++i)
            v(i, m) = problem.mode_value(lvl.first_mode + m, centers.point(i));
    }
    const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXcd>(v).singularValues();
    // Same scale as the single-center node test: |phi|^2 < 1e-24 peak.
    const double threshold = 1e-12 * std::sqrt(peak);
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > threshold) ++r;
    return r;
}

// Levels up to emax plus the first coupled level above it.
std::vector<CenterLevel> center_levels(const BaseProblem& problem, const CenterSet& centers, double emax) {
    std::vector<CenterLevel> out;
    for (std::size_t k = 0; k < problem.level_count(); ++k) {
        const EnergyLevel lvl = problem.level(k);
        CenterLevel c;
        c.level = k;
        c.energy = lvl.energy;
        c.guard = pole_guard(problem, k);
        c.multiplicity = lvl.multiplicity;
        c.rank = level_rank(problem, centers, lvl);
        out.push_back(c);
        if (lvl.energy > emax && c.rank > 0) break;
        if (out.size() > 100000) break;
    }
    return out;
}

double energy_scale(double E) { return std::max(1.0, std::abs(E)); }

struct Jump {
    double lo;
    double hi;
    int count;
};

// Splits [lo, hi] until each jump of the negative-eigenvalue count is isolated to width tol.
void locate(const std::function<int(double)>& nu, double lo, double hi, int nlo, int nhi, double tol,
            std::vector<Jump>& out) {
    if (nhi == nlo) return;
    if (hi - lo <= tol * energy_scale(0.5 * (lo + hi))) {
        out.push_back({lo, hi, nhi - nlo});
        return;
    }
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
        out.push_back({lo, hi, nhi - nlo});
        return;
    }
    const int nm = nu(mid);
    locate(nu, lo, mid, nlo, nm, tol, out);
    locate(nu, mid, hi, nm, nhi, tol, out);
}

struct Gap {
    double lo;
    double hi;
    std::optional<std::size_t> below;
    std::optional<std::size_t> above;
    bool bottom;
};

// Gaps between all levels (node levels too: G0 is evaluated there only outside the
// pole guard). below/above name the nearest coupled levels.
std::vector<Gap> gaps(const std::vector<CenterLevel>& levels, Window window, double top) {
    std::vector<Gap> out;
    double lo = window.emin;
    std::optional<std::size_t> below;
    bool bottom = true;
    const double hi_cap = std::min(window.emax, top - 1e-10 * energy_scale(top));
    auto coupled_from = [&](std::size_t i) -> std::optional<std::size_t> {
        for (; i < levels.size(); ++i)
            if (levels[i].rank > 0) return levels[i].level;
        return std::nullopt;
    };
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const CenterLevel& c = levels[i];
        const double hi = std::min(c.energy - 2.0 * c.guard, hi_cap);
        if (hi > lo) out.push_back({lo, hi, below, coupled_from(i), bottom});
        bottom = false;
        if (c.rank > 0) below = c.level;
        lo = std::max(lo, c.energy + 2.0 * c.guard);
        if (lo >= hi_cap) return out;
    }
    if (hi_cap > lo) out.push_back({lo, hi_cap, below, std::nullopt, bottom});
    return out;
}

Complex quadratic_form(const Eigen::VectorXcd& c, const Eigen::MatrixXcd& m) { return c.dot(m * c); }

}  // namespace

PrincipalMatrix phi_matrix(const BaseProblem& problem, const CenterSet& centers, Complex E, double tol) {
    validate(problem, centers);
    PrincipalMatrix out;
    out.energy = E;
    out.matrix = principal(problem, centers, E, tol);
    const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXcd>(out.matrix).singularValues();
    out.condition = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
    return out;
}

std::vector<BoundState> find_bound_states_multicenter(const BaseProblem& problem, const CenterSet& centers,
                                                      Window window, double tol, MulticenterOptions options,
                                                      MulticenterReport* report) {
    validate(problem, centers);
    const double top = problem.continuum_infimum();
    window.emax = std::min(window.emax, top);
    if (!(window.emin < window.emax)) fail(ErrorCode::InvalidArgument, "empty window");
    const std::vector<CenterLevel> levels = center_levels(problem, centers, window.emax);
    auto nu = [&](double E) { return hermitian_spectrum(problem, centers, E, tol).negative; };
    int negative_alphas = 0;
    for (double a : centers.alphas())
        if (a < 0.0) ++negative_alphas;
    const bool attractive = negative_alphas == 0;

    auto self = problem.shared_from_this();
    std::vector<BoundState> states;
    MulticenterReport local;
    for (const Gap& g : gaps(levels, window, top)) {
        const std::size_t n = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(200.0 * (g.hi - g.lo))),
                                                      2, 20000);
        std::vector<double> grid(n + 1);
        std::vector<int> counts(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            grid[i] = i == n ? g.hi : g.lo + (g.hi - g.lo) * static_cast<double>(i) / static_cast<double>(n);
            counts[i] = nu(grid[i]);
        }
        // Below the lowest pole the count starts at the number of repulsive centers.
        if (g.bottom && counts[0] > negative_alphas)
            fail(ErrorCode::WindowTooNarrow, "bound states lie below the window minimum");
        std::vector<Jump> jumps;
        for (std::size_t i = 0; i < n; ++i)
            locate(nu, grid[i], grid[i + 1], counts[i], counts[i + 1], std::max(tol, 1e-15), jumps);
        for (const Jump& j : jumps) {
            const double E = 0.5 * (j.lo + j.hi);
            const Spectrum sp = hermitian_spectrum(problem, centers, E, tol);
            Eigen::Index zero = 0;
            for (Eigen::Index i = 1; i < sp.values.size(); ++i)
                if (std::abs(sp.values(i)) < std::abs(sp.values(zero))) zero = i;
            double second = std::numeric_limits<double>::infinity();
            double largest = 0.0;
            for (Eigen::Index i = 0; i < sp.values.size(); ++i) {
                largest = std::max(largest, std::abs(sp.values(i)));
                if (i != zero) second = std::min(second, std::abs(sp.values(i)));
            }
            const double condition = sp.values.size() > 1 ? largest / second : 1.0;
            if (options.throw_on_ill_conditioned && condition > 1e12)
                fail(ErrorCode::IllConditioned, "nearly degenerate roots near E = " + std::to_string(E));
            local.conditions.push_back(condition);

            Eigen::MatrixXcd d(centers.size(), centers.size());
            for (std::size_t a = 0; a < centers.size(); ++a)
                for (std::size_t b = 0; b < centers.size(); ++b)
                    d(a, b) = green0_energy_derivative(problem, centers.point(a), centers.point(b), Complex(E, 0.0),
                                                       tol)
                                  .value;
            const Eigen::VectorXcd c = sp.vectors.col(zero);
            const double norm = quadratic_form(c, d).real();

            BoundState s;
            s.energy = E;
            s.lo = j.lo;
            s.hi = j.hi;
            s.kind = StateKind::Shifted;
            s.multiplicity = static_cast<std::size_t>(j.count);
            s.normalization = norm;
            s.residual = sp.values(zero);
            s.slope = -norm;
            s.level = attractive ? g.above : (g.below ? g.below : g.above);
            if (s.level) s.old_energy = problem.level(*s.level).energy;
            std::vector<Point> pts = centers.points();
            std::vector<Complex> coeff(c.data(), c.data() + c.size());
            const double scale = 1.0 / std::sqrt(norm);
            s.wavefunction = [self, pts, coeff, scale, E, tol](Point x) {
                Complex v{};
                for (std::size_t i = 0; i < pts.size(); ++i) v += green0(*self, x, pts[i], E, tol).value * coeff[i];
                return v * scale;
            };
            states.push_back(std::move(s));
        }
    }
    for (const CenterLevel& c : levels) {
        if (c.energy < window.emin || c.energy > window.emax || c.rank == c.multiplicity) continue;
        BoundState s;
        s.energy = s.lo = s.hi = s.old_energy = c.energy;
        s.level = c.level;
        s.kind = c.rank == 0 ? StateKind::UnchangedNode : StateKind::UnchangedDegenerate;
        s.multiplicity = c.multiplicity - c.rank;
        if (c.multiplicity == 1) {
            const std::size_t mode = problem.level(c.level).first_mode;
            s.wavefunction = [self, mode](Point x) { return self->mode_value(mode, x); };
        }
        states.push_back(std::move(s));
    }
    std::sort(states.begin(), states.end(),
              [](const BoundState& l, const BoundState& r) { return l.energy < r.energy; });

    if (options.cross_check) {
        local.recursive = recursive_bound_states(problem, centers, window, tol);
        std::vector<double> direct;
        for (const BoundState& s : states)
            for (std::size_t m = 0; m < s.multiplicity; ++m) direct.push_back(s.energy);
        local.consistent = direct.size() == local.recursive.size();
        for (std::size_t i = 0; local.consistent && i < direct.size(); ++i)
            local.max_deviation = std::max(local.max_deviation, std::abs(direct[i] - local.recursive[i]));
        if (!local.consistent) local.max_deviation = std::numeric_limits<double>::infinity();
        local.consistent = local.consistent && local.max_deviation <= std::max(1e-8, 1e3 * tol);
    }
    if (report) *report = std::move(local);
    return states;
}

namespace {

// Diagonal entry j of the Green's matrix of H0 - sum_{i<j} alpha_i delta_{a_i}.
double recursive_diagonal(const BaseProblem& problem, const CenterSet& centers, std::size_t j, double E,
                          double tol) {
    Eigen::MatrixXcd m = green_matrix(problem, centers, Complex(E, 0.0), tol);
    for (std::size_t i = 0; i < j; ++i) {
        const Complex d = 1.0 / centers.alpha(i) - m(i, i);
        const Eigen::VectorXcd col = m.col(i);
        const Eigen::RowVectorXcd row = m.row(i);
        m += col * row / d;
    }
    return m(j, j).real();
}

struct Break {
    double energy;
    double guard;  // excluded half-width
};

// Roots of the decreasing pieces of f between the breakpoints, scanned with sign changes.
std::vector<double> scan_roots(const std::function<double(double)>& f, std::vector<Break> breaks, double lo,
                               double hi, double tol) {
    std::sort(breaks.begin(), breaks.end(), [](const Break& l, const Break& r) { return l.energy < r.energy; });
    std::vector<Break> edges{{lo, 0.0}};
    for (const Break& b : breaks)
        if (b.energy > lo && b.energy < hi) edges.push_back(b);
    edges.push_back({hi, 0.0});
    std::vector<double> roots;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double a = edges[e].energy + edges[e].guard;
        const double b = edges[e + 1].energy - edges[e + 1].guard;
        if (!(b > a)) continue;
        const std::size_t n = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(400.0 * (b - a))), 4, 40000);
        double x0 = a;
        double f0 = f(a);
        for (std::size_t i = 1; i <= n; ++i) {
            const double x1 = i == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
            const double f1 = f(x1);
            if (f0 > 0.0 && f1 <= 0.0) {
                double l = x0;
                double h = x1;
                while (h - l > std::max(tol, 1e-15) * energy_scale(l)) {
                    const double m = 0.5 * (l + h);
                    if (m <= l || m >= h) break;
                    (f(m) > 0.0 ? l : h) = m;
                }
                roots.push_back(0.5 * (l + h));
            }
            x0 = x1;
            f0 = f1;
        }
    }
    return roots;
}

}  // namespace

std::vector<double> recursive_bound_states(const BaseProblem& problem, const CenterSet& centers, Window window,
                                           double tol) {
    validate(problem, centers);
    const double top = problem.continuum_infimum();
    const double hi = std::min(window.emax, top - 1e-10 * energy_scale(top));
    std::vector<Break> old_levels;
    for (std::size_t k = 0; k < problem.level_count(); ++k) {
        const double e = problem.level(k).energy;
        if (e > window.emax) break;
        if (e >= window.emin) old_levels.push_back({e, 3.0 * pole_guard(problem, k)});
    }
    std::vector<Break> spectrum = old_levels;  // H0 itself
    for (std::size_t j = 0; j < centers.size(); ++j) {
        auto f = [&](double E) { return 1.0 / centers.alpha(j) - recursive_diagonal(problem, centers, j, E, tol); };
        std::vector<Break> breaks = spectrum;
        breaks.insert(breaks.end(), old_levels.begin(), old_levels.end());
        std::vector<Break> next;
        for (double r : scan_roots(f, breaks, window.emin, hi, tol)) next.push_back({r, 1e-8 * energy_scale(r)});
        // Eigenvalues of the previous stage that the new center does not see survive.
        for (const Break& e : spectrum) {
            const bool pole = f(e.energy - e.guard) < 0.0 && f(e.energy + e.guard) > 0.0;
            if (!pole) next.push_back(e);
        }
        std::sort(next.begin(), next.end(), [](const Break& l, const Break& r) { return l.energy < r.energy; });
        spectrum = std::move(next);
    }
    std::vector<double> out;
    for (const Break& b : spectrum) out.push_back(b.energy);
    return out;
}

Complex full_green_multicenter(const BaseProblem& problem, const CenterSet& centers, Point x, Point y, Complex E,
                               double tol) {
    validate(problem, centers);
    const PrincipalMatrix p = phi_matrix(problem, centers, E, tol);
    if (!(p.condition < 1e14)) fail(ErrorCode::ZeroOfPhi, "Phi(E) is singular: E is a perturbed eigenvalue");
    const std::size_t n = centers.size();
    Eigen::VectorXcd gy(n);
    Eigen::RowVectorXcd gx(n);
    for (std::size_t i = 0; i < n; ++i) {
        gy(i) = green0(problem, centers.point(i), y, E, tol).value;
        gx(i) = green0(problem, x, centers.point(i), E, tol).value;
    }
    const Eigen::VectorXcd u = p.matrix.partialPivLu().solve(gy);
    return green0(problem, x, y, E, tol).value + (gx * u)(0);
}

ScatteringState generalized_eigenfunction_multicenter(const BaseProblem& problem, const CenterSet& centers,
                                                      double k, double tol) {
    validate(problem, centers);
    (void)tol;
    if (!problem.has_boundary_values() || problem.channels().empty())
        fail(ErrorCode::Unsupported, problem.label() + ": needs closed-form boundary values");
    if (k == 0.0) fail(ErrorCode::InvalidArgument, "scattering at threshold k = 0");
    const auto channel = problem.channels().front();
    const double E = channel->dispersion(k);
    const std::size_t n = centers.size();
    Eigen::MatrixXcd phi(n, n);
    Eigen::VectorXcd chi(n);
    for (std::size_t i = 0; i < n; ++i) {
        chi(i) = channel->eigenfunction(k, centers.point(i));
        for (std::size_t j = 0; j < n; ++j)
            phi(i, j) = (i == j ? 1.0 / centers.alpha(i) : 0.0) -
                        problem.closed_green_boundary(centers.point(i), centers.point(j), E, Side::Plus);
    }
    const Eigen::VectorXcd w = phi.partialPivLu().solve(chi);
    auto self = problem.shared_from_this();
    std::vector<Point> pts = centers.points();
    std::vector<Complex> coeff(w.data(), w.data() + w.size());
    ScatteringState out;
    out.energy = E;
    out.k = k;
    out.values = [self, channel, pts, coeff, k, E](Point x) {
        Complex v = channel->eigenfunction(k, x);
        for (std::size_t i = 0; i < pts.size(); ++i)
            v += self->closed_green_boundary(x, pts[i], E, Side::Plus) * coeff[i];
        return v;
    };
    if (problem.dimension() == 1) {
        double extent = 0.0;
        for (const Point& p : pts) extent = std::max(extent, std::abs(p.x));
        fill_scattering_coefficients(out, extent);
    }
    return out;
}

}  // namespace krein
