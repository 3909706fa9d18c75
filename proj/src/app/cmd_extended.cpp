// perturb, renorm, multicenter and curve.

#include <algorithm>
#include <cmath>
#include <limits>

#include "context.hpp"
#include "krein/perturb.hpp"

namespace krein::app {

namespace {

Json states_array(const std::vector<BoundState>& states) {
    Json out = Json::array();
    for (const BoundState& s : states) out.push_back(state_json(s));
    return out;
}

std::vector<double> shifted_energies(const std::vector<BoundState>& states) {
    std::vector<double> out;
    for (const BoundState& s : states)
        if (s.kind == StateKind::Shifted) out.push_back(s.energy);
    return out;
}

// Exact perturbed energy attached to level k, from the full secular search.
template <class Find>
double exact_root(const BaseProblem& p, std::size_t k, double E1, bool attractive, Find find) {
    const double Ek = p.level(k).energy;
    const double inf = p.continuum_infimum();
    double emax = Ek;
    if (!attractive) emax = k + 1 < p.level_count() ? std::min(inf, p.level(k + 1).energy) : inf;
    if (!std::isfinite(emax)) emax = Ek + 4.0 * std::abs(E1) + 1.0;
    double spread = 4.0 * std::abs(E1) + 1.0;
    for (int attempt = 0; attempt < 30; ++attempt) {
        try {
            const std::vector<BoundState> states = find(Window{p.level(0).energy - spread, emax});
            for (const BoundState& s : states)
                if (s.kind == StateKind::Shifted && s.level && *s.level == k) return s.energy;
            return std::numeric_limits<double>::quiet_NaN();
        } catch (const SolverError& e) {
            if (e.code() != ErrorCode::WindowTooNarrow) throw;
            spread *= 4.0;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

struct GridResidual {
    double value = 0.0;
    std::string method;
};

// L2 distance between psi0 + psi1 + psi2 and the exact normalized state, up to phase.
// The series terms scale as alpha^0, alpha^1, alpha^2, so they are sampled once at unit coupling.
class WavefunctionCheck {
public:
    WavefunctionCheck(const Context& ctx, bool renormalized, std::size_t k) : ctx_(ctx), renorm_(renormalized), k_(k) {
        const BaseProblem& p = *ctx.problem;
        modes_ = static_cast<std::size_t>(ctx.cfg.integer("solver", "modes", 0));
        if (p.dimension() == 2 && modes_ == 0) modes_ = 2000;
        if (modes_ > 0) {
            model_.emplace(p, support_from(ctx), modes_);
            return;
        }
        const double lo = ctx.cfg.number("output", "profile_min", -15.0);
        const double hi = ctx.cfg.number("output", "profile_max", 15.0);
        const auto n = static_cast<std::size_t>(std::max<long>(3, ctx.cfg.integer("output", "profile_points", 601)));
        xs_ = linspace(lo, hi, n);
        h_ = (hi - lo) / double(n - 1);
        for (double x : xs_) {
            WavefunctionValues w;
            if (renorm_) {
                RenormalizedPerturbation r = renormalized_perturbation(ctx);
                r.inv_alpha_r = 1.0;
                w = wavefunction_corrections_renormalized(p, r, k, Point{x, 0.0}, ctx.tol);
            } else {
                w = wavefunction_corrections(p, point_perturbation(ctx, 1.0), k, Point{x, 0.0}, ctx.tol);
            }
            unit_.push_back(w);
        }
    }

    GridResidual residual(double alpha, const std::function<Complex(Point)>& exact, double Estar,
                          double mu2) const {
        if (model_) {
            const TruncatedModel& m = *model_;
            const double s1 = renorm_ ? m.renormalized_sum(k_, mu2) : m.regular_sum(k_, 1);
            const auto terms = m.series(k_, alpha, s1);
            std::vector<Complex> sum(m.size());
            for (std::size_t n = 0; n < m.size(); ++n) sum[n] = terms[0][n] + terms[1][n] + terms[2][n];
            auto f = [&](double E) {
                return renorm_ ? m.phi_renormalized(E, 1.0 / alpha, mu2) : m.phi_regular(E, alpha);
            };
            const double root = m.root(f, k_, true, 1e-15);
            return {phase_aligned_distance(sum, m.residue(root)), "truncated-modes"};
        }
        (void)Estar;
        std::vector<Complex> series;
        std::vector<Complex> truth;
        const double w = std::sqrt(h_);
        for (std::size_t i = 0; i < xs_.size(); ++i) {
            const WavefunctionValues& u = unit_[i];
            series.push_back(w * (u.psi0 + alpha * u.psi1 + alpha * alpha * u.psi2));
            truth.push_back(w * exact(Point{xs_[i], 0.0}));
        }
        return {phase_aligned_distance(series, truth), "grid"};
    }

    std::size_t modes() const { return modes_; }

private:
    const Context& ctx_;
    bool renorm_;
    std::size_t k_;
    std::size_t modes_ = 0;
    std::optional<TruncatedModel> model_;
    std::vector<double> xs_;
    double h_ = 0.0;
    std::vector<WavefunctionValues> unit_;
};

// Even and odd states of two equal attractive centres on the free line:
// 2cq/alpha = 1 +- exp(-q D), E = -c q^2.
std::vector<double> double_well_energies(double alpha, double D, double c) {
    auto bisect = [](auto f, double lo, double hi) {
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (f(lo) < 0.0) == (f(mid) < 0.0) ? lo = mid : hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    std::vector<double> out;
    const double qmax = alpha / c + 1.0;
    const double qe = bisect([&](double q) { return 2.0 * c * q / alpha - 1.0 - std::exp(-q * D); }, 0.0, qmax);
    out.push_back(-c * qe * qe);
    if (alpha * D > 2.0 * c) {
        const double q0 = std::log(alpha * D / (2.0 * c)) / D;  // minimum of the odd function
        const double qo = bisect([&](double q) { return 2.0 * c * q / alpha - 1.0 + std::exp(-q * D); }, q0, qmax);
        out.push_back(-c * qo * qo);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

Json cmd_perturb(Context& ctx) {
    const BaseProblem& p = *ctx.problem;
    const std::string kind = perturbation_kind(ctx);
    if (kind != "point" && kind != "renormalized") throw ConfigError("perturb supports point and renormalized kinds");
    const bool renorm = kind == "renormalized";
    const auto k = static_cast<std::size_t>(ctx.cfg.integer("solver", "level", 0));
    const std::vector<double> cutoffs = ctx.cfg.numbers("solver", "cutoffs");
    const bool want_wavefunction = ctx.cfg.flag("solver", "wavefunction", false);
    const Point a = support_from(ctx);

    std::vector<double> alphas;
    if (renorm && !ctx.cfg.has("perturbation", "alpha")) {
        const double inv = ctx.cfg.number("perturbation", "inv_alpha_r", 0.0);
        if (inv == 0.0) throw ConfigError("perturb needs a nonzero alpha_R (perturbation.alpha or inv_alpha_r)");
        alphas = {1.0 / inv};
    } else {
        alphas = alpha_list(ctx);
    }
    const double mu2 = renorm ? renormalized_perturbation(ctx).mu2 : 0.0;
    if (!renorm && p.dimension() == 2 && cutoffs.empty())
        throw ConfigError("the regular series diverges in two dimensions; set solver.cutoffs");

    std::optional<WavefunctionCheck> check;
    if (want_wavefunction) check.emplace(ctx, renorm, k);

    Json series = Json::array();
    std::vector<double> residuals;
    std::vector<double> wf_residuals;
    const bool node = k < p.level_count() && is_node(p, k, a);
    for (double alpha : alphas) {
        Json row{{"alpha", alpha}, {"k", k}};
        if (node) {
            // The level is untouched: every correction vanishes.
            const double Ek = p.level(k).energy;
            row.update({{"E0", Ek}, {"E1", 0.0}, {"E2", 0.0}, {"guard", 0.0}, {"reliable", true},
                        {"exact_root", Ek}, {"residual", 0.0}, {"node", true}});
            series.push_back(row);
            continue;
        }
        EnergyCorrections ec;
        double Estar = std::numeric_limits<double>::quiet_NaN();
        std::function<Complex(Point)> exact_wf;
        if (renorm) {
            RenormalizedPerturbation r{a, 1.0 / alpha, mu2};
            ec = energy_corrections_renormalized(p, r, k, ctx.tol);
            Estar = exact_root(p, k, ec.E1, true, [&](Window w) {
                auto states = find_bound_states_renormalized(p, r, w, ctx.tol);
                for (const BoundState& s : states)
                    if (s.kind == StateKind::Shifted && s.level && *s.level == k) exact_wf = s.wavefunction;
                return states;
            });
            if (!cutoffs.empty()) {
                Json cmp = Json::array();
                for (double cutoff : cutoffs) {
                    const EnergyCorrections reg = energy_corrections(p, PointPerturbation{a, alpha}, k, ctx.tol, cutoff);
                    cmp.push_back({{"cutoff", cutoff},
                                   {"E1_regular", reg.E1},
                                   {"E2_regular", reg.E2},
                                   {"E1_difference", ec.E1 - reg.E1},
                                   {"E2_difference", ec.E2 - reg.E2}});
                }
                row["regular_comparison"] = cmp;
            }
        } else {
            const PointPerturbation pert{a, alpha};
            if (p.dimension() == 2) {
                Json cuts = Json::array();
                for (double cutoff : cutoffs) {
                    ec = energy_corrections(p, pert, k, ctx.tol, cutoff);
                    cuts.push_back({{"cutoff", cutoff}, {"E1", ec.E1}, {"E2", ec.E2}});
                }
                row["cutoffs"] = cuts;
            } else {
                ec = energy_corrections(p, pert, k, ctx.tol);
                Estar = exact_root(p, k, ec.E1, alpha > 0.0, [&](Window w) {
                    auto states = find_bound_states(p, pert, w, ctx.tol);
                    for (const BoundState& s : states)
                        if (s.kind == StateKind::Shifted && s.level && *s.level == k) exact_wf = s.wavefunction;
                    return states;
                });
            }
        }
        const double residual = std::abs(Estar - ec.E0 - ec.E1 - ec.E2);
        row["E0"] = ec.E0;
        row["E1"] = ec.E1;
        row["E2"] = ec.E2;
        row["guard"] = ec.guard;
        row["reliable"] = ec.reliable;
        row["exact_root"] = number(Estar);
        row["residual"] = number(residual);
        residuals.push_back(residual);
        if (check && (exact_wf || check->modes() > 0)) {
            const GridResidual g = check->residual(alpha, exact_wf, Estar, mu2);
            row["wavefunction_residual"] = g.value;
            row["wavefunction_method"] = g.method;
            wf_residuals.push_back(g.value);
        }
        series.push_back(row);
    }

    Json pj{{"kind", kind}, {"support", point_json(a, p.dimension())}};
    if (renorm) pj["mu2"] = mu2;
    Json doc{{"perturbation", pj}, {"k", k}, {"series", series}};
    if (series.size() == 1) {
        for (const char* key : {"E1", "E2", "guard", "exact_root", "residual"}) doc[key] = series[0][key];
    }
    if (auto s = loglog_slope(alphas, residuals)) doc["residual_slope"] = *s;
    if (auto s = loglog_slope(alphas, wf_residuals)) doc["wavefunction_slope"] = *s;
    return doc;
}

Json cmd_renorm(Context& ctx) {
    const BaseProblem& p = *ctx.problem;
    const RenormalizedPerturbation r = renormalized_perturbation(ctx);
    const Window window = window_from(ctx);
    const auto states = find_bound_states_renormalized(p, r, window, ctx.tol);
    const std::vector<double> base = shifted_energies(states);

    Json flows = Json::array();
    double worst = 0.0;
    for (double mu2 : ctx.cfg.numbers("solver", "flow_mu2")) {
        if (!(mu2 > 0.0)) throw ConfigError("solver.flow_mu2 entries must be positive");
        const double inv = coupling_flow(p, r.a, r.inv_alpha_r, r.mu2, mu2, ctx.tol);
        const auto moved = shifted_energies(find_bound_states_renormalized(p, {r.a, inv, mu2}, window, ctx.tol));
        double dev = moved.size() == base.size() ? 0.0 : std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < base.size() && i < moved.size(); ++i)
            dev = std::max(dev, std::abs(base[i] - moved[i]));
        worst = std::max(worst, dev);
        flows.push_back({{"mu2", mu2},
                         {"invAlphaR", inv},
                         {"states", moved.size()},
                         {"max_deviation", number(dev)}});
    }
    Json doc{{"perturbation", {{"kind", "renormalized"}, {"support", point_json(r.a, p.dimension())}}},
             {"invAlphaR", r.inv_alpha_r},
             {"mu2", r.mu2},
             {"window", {window.emin, window.emax}},
             {"states", states_array(states)},
             {"flow_checks", flows}};
    if (!flows.empty()) doc["flow_max_deviation"] = number(worst);
    if (r.inv_alpha_r == 0.0 && !base.empty())
        doc["renormalization_condition"] = {{"ground_state", base.front()},
                                            {"expected", -r.mu2},
                                            {"deviation", std::abs(base.front() + r.mu2)}};
    return doc;
}

Json cmd_multicenter(Context& ctx) {
    const BaseProblem& p = *ctx.problem;
    const CenterSet centers = center_set(ctx);
    const Window window = window_from(ctx);
    MulticenterReport report;
    const auto states = find_bound_states_multicenter(p, centers, window, ctx.tol, {}, &report);

    const int dim = p.dimension();
    Json pts = Json::array();
    for (Point q : centers.points()) pts.push_back(point_json(q, dim));
    Json doc{{"perturbation", {{"kind", "centers"}, {"centers", pts}, {"alphas", centers.alphas()}}},
             {"window", {window.emin, window.emax}},
             {"states", states_array(states)},
             {"recursive", report.recursive},
             {"max_deviation", report.max_deviation},
             {"consistent", report.consistent},
             {"conditions", report.conditions}};

    const auto& al = centers.alphas();
    if (p.label() == "free-line" && centers.size() == 2 && al[0] == al[1] && al[0] > 0.0) {
        const double D = std::abs(centers.point(0).x - centers.point(1).x);
        const std::vector<double> analytic = double_well_energies(al[0], D, p.kinetic());
        const std::vector<double> found = shifted_energies(states);
        double dev = found.size() == analytic.size() ? 0.0 : std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < found.size() && i < analytic.size(); ++i)
            dev = std::max(dev, std::abs(found[i] - analytic[i]));
        doc["double_well"] = {{"analytic", analytic}, {"max_deviation", number(dev)}};
    }
    return doc;
}

Json cmd_curve(Context& ctx) {
    const BaseProblem& p = *ctx.problem;
    const CurveSupport curve = curve_from(ctx);
    const double alpha = alpha_list(ctx).front();
    const Window window = window_from(ctx);
    const bool disk = ctx.cfg.flag("solver", "disk_check", true);
    const auto found = find_bound_states_curve(p, curve, alpha, window, ctx.tol, disk);

    Json pj{{"kind", "curve"},
            {"curve", ctx.cfg.text("perturbation", "curve", "circle")},
            {"alpha", alpha},
            {"length", curve.length()},
            {"order", curve.order()},
            {"center", point_json(curve.center(), 2)}};
    Json states = Json::array();
    for (const CurveBoundState& s : found) {
        Json j = state_json(s.state);
        j["order"] = s.order;
        j["root_shift"] = s.root_shift;
        if (disk) {
            j["disk_norm"] = s.disk_norm;
            j["disk_tail"] = s.disk_tail;
        }
        states.push_back(j);
    }

    const long n = ctx.cfg.integer("output", "profile_points", 0);
    if (n > 0 && !found.empty()) {
        const Point c = curve.center();
        const double lo = ctx.cfg.number("output", "profile_min", 0.0);
        const double hi = ctx.cfg.number("output", "profile_max", curve.extent() + 4.0);
        CsvTable table({"x", "psi2"});
        for (double x : linspace(lo, hi, static_cast<std::size_t>(n)))
            table.add({x, std::norm(found.front().state.wavefunction(Point{c.x + x, c.y}))});
        ctx.csv["profile"] = table.str();
    }
    return {{"perturbation", pj}, {"window", {window.emin, window.emax}}, {"states", states}};
}

}  // namespace krein::app
