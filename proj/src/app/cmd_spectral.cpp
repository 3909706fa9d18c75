// spectrum, green, scatter and secular.

#include <algorithm>
#include <cmath>
#include <limits>

#include "context.hpp"

namespace krein::app {

namespace {

bool skippable(const SolverError& e) {
    return e.code() == ErrorCode::PoleProximity || e.code() == ErrorCode::CutViolation ||
           e.code() == ErrorCode::ZeroOfPhi;
}

Json states_array(const std::vector<BoundState>& states) {
    Json out = Json::array();
    for (const BoundState& s : states) out.push_back(state_json(s));
    return out;
}

Json residuals_array(const std::vector<BoundState>& states) {
    Json out = Json::array();
    for (const BoundState& s : states)
        if (s.kind == StateKind::Shifted) out.push_back(number(s.residual));
    return out;
}

Json interlacing_json(const InterlacingReport& r, const BaseProblem& problem) {
    Json rows = Json::array();
    double node_shift = 0.0;
    for (const InterlacingRow& row : r.rows) {
        rows.push_back({{"level", row.level},
                        {"lower", number(row.lower)},
                        {"value", number(row.value)},
                        {"upper", number(row.upper)},
                        {"node", row.node},
                        {"ok", row.ok}});
        if (row.node) {
            const double shift = std::abs(row.value - problem.level(row.level).energy);
            node_shift = std::max(node_shift, std::isfinite(shift) ? shift : std::numeric_limits<double>::infinity());
        }
    }
    return {{"all_ok", r.all_ok}, {"rows", rows}, {"max_node_shift", number(node_shift)}};
}

// |psi|^2 profiles along the x axis for the states that carry a wavefunction.
void add_profiles(Context& ctx, const std::vector<BoundState>& states) {
    const long n = ctx.cfg.integer("output", "profile_points", 0);
    if (n <= 0) return;
    const double lo = ctx.cfg.number("output", "profile_min", -10.0);
    const double hi = ctx.cfg.number("output", "profile_max", 10.0);
    std::vector<std::string> header = {"x"};
    std::vector<const BoundState*> with;
    for (const BoundState& s : states) {
        if (!s.wavefunction) continue;
        header.push_back("psi2_" + std::to_string(with.size()));
        with.push_back(&s);
    }
    CsvTable table(header);
    for (double x : linspace(lo, hi, static_cast<std::size_t>(n))) {
        std::vector<double> row = {x};
        for (const BoundState* s : with) row.push_back(std::norm(s->wavefunction(Point{x, 0.0})));
        table.add(row);
    }
    ctx.csv["profile"] = table.str();
}

Complex perturbed_green(const Context& ctx, const std::string& kind, Point x, Point y, Complex E) {
    if (kind == "renormalized")
        return full_green_renormalized(*ctx.problem, renormalized_perturbation(ctx), x, y, E, ctx.tol);
    if (kind == "centers") return full_green_multicenter(*ctx.problem, center_set(ctx), x, y, E, ctx.tol);
    if (kind == "curve") throw ConfigError("green does not support curve perturbations");
    return full_green(*ctx.problem, point_perturbation(ctx, alpha_list(ctx).front()), x, y, E, ctx.tol);
}

Json perturbation_json(const Context& ctx, const std::string& kind) {
    const int dim = ctx.problem->dimension();
    Json j{{"kind", kind}};
    if (kind == "point") {
        j["support"] = point_json(support_from(ctx), dim);
        const auto alphas = alpha_list(ctx);
        if (alphas.size() == 1)
            j["alpha"] = alphas.front();
        else
            j["alphas"] = alphas;
    } else if (kind == "renormalized") {
        const auto r = renormalized_perturbation(ctx);
        j["support"] = point_json(r.a, dim);
        j["invAlphaR"] = r.inv_alpha_r;
        j["mu2"] = r.mu2;
    } else if (kind == "centers") {
        const CenterSet c = center_set(ctx);
        Json pts = Json::array();
        for (Point p : c.points()) pts.push_back(point_json(p, dim));
        j["centers"] = pts;
        j["alphas"] = c.alphas();
    }
    return j;
}

}  // namespace

Json cmd_spectrum(Context& ctx) {
    const std::string kind = perturbation_kind(ctx);
    if (kind == "centers") return cmd_multicenter(ctx);
    if (kind == "curve") return cmd_curve(ctx);
    const Window window = window_from(ctx);
    Json doc;
    doc["perturbation"] = perturbation_json(ctx, kind);
    doc["window"] = {window.emin, window.emax};

    if (kind == "renormalized") {
        const auto states = find_bound_states_renormalized(*ctx.problem, renormalized_perturbation(ctx), window, ctx.tol);
        doc["states"] = states_array(states);
        doc["residuals"] = residuals_array(states);
        add_profiles(ctx, states);
        return doc;
    }

    const std::vector<double> alphas = alpha_list(ctx);
    const long depth = ctx.cfg.integer("solver", "depth", 0);
    const bool sweep = ctx.cfg.integer("solver", "random_alphas", 0) > 0;
    Json runs = Json::array();
    bool all_ok = true;
    for (double alpha : alphas) {
        const PointPerturbation pert = point_perturbation(ctx, alpha);
        Json run{{"alpha", alpha}};
        if (!sweep) {
            const auto states = find_bound_states(*ctx.problem, pert, window, ctx.tol);
            run["states"] = states_array(states);
            run["residuals"] = residuals_array(states);
            if (alphas.size() == 1) add_profiles(ctx, states);
        }
        if (depth > 0) {
            const auto report = verify_interlacing(*ctx.problem, pert, static_cast<std::size_t>(depth), ctx.tol);
            run["interlacing"] = interlacing_json(report, *ctx.problem);
            all_ok = all_ok && report.all_ok;
        }
        runs.push_back(run);
    }
    if (alphas.size() == 1 && !sweep) {
        doc["states"] = runs[0]["states"];
        doc["residuals"] = runs[0]["residuals"];
        if (runs[0].contains("interlacing")) doc["interlacing"] = runs[0]["interlacing"];
    } else {
        doc["sweep"] = runs;
    }
    if (depth > 0) doc["all_interlaced"] = all_ok;
    return doc;
}

Json cmd_green(Context& ctx) {
    const BaseProblem& p = *ctx.problem;
    const Point x = ctx.cfg.point("solver", "x", Point{0.3, 0.0});
    const Point y = ctx.cfg.point("solver", "y", Point{-0.2, 0.0});
    const bool perturbed = ctx.cfg.has("perturbation", "kind") || ctx.cfg.has("perturbation", "alpha");
    const std::string kind = perturbation_kind(ctx);
    Json doc;
    doc["x"] = point_json(x, p.dimension());
    doc["y"] = point_json(y, p.dimension());
    if (perturbed) doc["perturbation"] = perturbation_json(ctx, kind);

    std::vector<double> energies = ctx.cfg.numbers("solver", "energy");
    if (energies.empty() && (ctx.cfg.has("solver", "emin") || ctx.cfg.has("solver", "emax") ||
                             ctx.cfg.has("solver", "grid_points"))) {
        const Window w = window_from(ctx);
        energies = linspace(w.emin, w.emax, static_cast<std::size_t>(ctx.cfg.integer("solver", "grid_points", 101)));
    }
    std::vector<std::string> header = {"E", "re_G0", "im_G0", "error"};
    if (perturbed) {
        header.push_back("re_G");
        header.push_back("im_G");
    }
    CsvTable table(header);
    std::size_t dropped = 0;
    for (double E : energies) {
        try {
            const GreenEvaluation g0 = green0(p, x, y, E, ctx.tol);
            std::vector<double> row = {E, g0.value.real(), g0.value.imag(), g0.quadrature_error};
            if (perturbed) {
                const Complex g = perturbed_green(ctx, kind, x, y, E);
                row.push_back(g.real());
                row.push_back(g.imag());
            }
            table.add(row);
        } catch (const SolverError& e) {
            if (!skippable(e)) throw;
            ++dropped;
        }
    }
    if (!energies.empty()) ctx.csv[""] = table.str();
    doc["samples"] = table.rows();
    doc["dropped"] = dropped;

    if (auto level = ctx.cfg.optional_number("solver", "probe_level")) {
        // E = E_k (1 +- 10^-j); a level at zero uses its distance to the next level as the scale.
        const auto k = static_cast<std::size_t>(*level);
        const double Ek = p.level(k).energy;
        double scale = std::abs(Ek);
        if (scale == 0.0) scale = std::abs(p.level(k + 1).energy - Ek);
        Json samples = Json::array();
        double gmin = std::numeric_limits<double>::infinity();
        double gmax = 0.0;
        double smin = std::numeric_limits<double>::infinity();
        double smax = 0.0;
        for (int j = 2; j <= 6; ++j) {
            for (int side : {-1, 1}) {
                const double E = Ek + side * scale * std::pow(10.0, -j);
                const double g0 = std::abs(green0(p, x, y, E, ctx.tol).value);
                Json s{{"j", j}, {"side", side}, {"E", E}, {"abs_G0", g0}};
                smin = std::min(smin, g0 * std::abs(E - Ek));
                smax = std::max(smax, g0 * std::abs(E - Ek));
                if (perturbed) {
                    const double g = std::abs(perturbed_green(ctx, kind, x, y, E));
                    s["abs_G"] = g;
                    gmin = std::min(gmin, g);
                    gmax = std::max(gmax, g);
                }
                samples.push_back(s);
            }
        }
        Json probe{{"level", k}, {"E_k", Ek}, {"scale", scale}, {"samples", samples},
                   {"G0_scaled_variation", number(smax / smin)}};
        if (perturbed) probe["G_variation"] = number(gmax / gmin);
        doc["pole_probe"] = probe;
    }

    if (auto eps = ctx.cfg.optional_number("solver", "epsilon")) {
        // G0(E + i eps) - G0(E - i eps) against 2 pi i rho at seeded random points.
        const double E = ctx.cfg.numbers("solver", "energy", {1.0}).front();
        const auto count = static_cast<std::size_t>(ctx.cfg.integer("solver", "random_points", 10));
        const auto seed = static_cast<std::uint64_t>(ctx.cfg.integer("solver", "seed", 1));
        const auto coords = uniform_draws(seed, 4 * count, -5.0, 5.0);
        Json samples = Json::array();
        double worst = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const Point xi{coords[4 * i], p.dimension() == 2 ? coords[4 * i + 1] : 0.0};
            const Point yi{coords[4 * i + 2], p.dimension() == 2 ? coords[4 * i + 3] : 0.0};
            const Complex up = green0(p, xi, yi, Complex(E, *eps), ctx.tol).value;
            const Complex down = green0(p, xi, yi, Complex(E, -*eps), ctx.tol).value;
            const Complex expected = Complex(0.0, 2.0 * kPi) * spectral_density(p, xi, yi, E);
            const double err = std::abs(up - down - expected);
            worst = std::max(worst, err);
            samples.push_back({{"x", point_json(xi, p.dimension())},
                               {"y", point_json(yi, p.dimension())},
                               {"error", err}});
        }
        doc["jump"] = {{"E", E}, {"epsilon", *eps}, {"samples", samples}, {"max_error", worst}};
    }
    return doc;
}

Json cmd_scatter(Context& ctx) {
    const BaseProblem& p = *ctx.problem;
    if (p.dimension() != 1) throw ConfigError("scatter needs a one-dimensional problem");
    const std::string kind = perturbation_kind(ctx);
    if (kind != "point" && kind != "centers") throw ConfigError("scatter supports point and centers perturbations");
    const double kmin = ctx.cfg.number("solver", "kmin", 0.1);
    const double kmax = ctx.cfg.number("solver", "kmax", 5.0);
    const long count = ctx.cfg.integer("solver", "k_count", 20);
    if (count < 1) throw ConfigError("solver.k_count must be positive");
    Json doc;
    doc["perturbation"] = perturbation_json(ctx, kind);
    CsvTable table({"k", "R2", "T2"});
    Json samples = Json::array();
    double worst = 0.0;
    double closed = 0.0;
    const bool free_point = kind == "point" && p.label() == "free-line";
    const double c = p.kinetic();
    for (double k : linspace(kmin, kmax, static_cast<std::size_t>(count))) {
        ScatteringState s;
        double alpha = 0.0;
        if (kind == "point") {
            alpha = alpha_list(ctx).front();
            s = generalized_eigenfunction(p, point_perturbation(ctx, alpha), k, ctx.tol);
        } else {
            s = generalized_eigenfunction_multicenter(p, center_set(ctx), k, ctx.tol);
        }
        const double R2 = std::norm(s.reflection);
        const double T2 = std::norm(s.transmission);
        const double unitarity = std::abs(R2 + T2 - 1.0);
        worst = std::max(worst, unitarity);
        Json row{{"k", k}, {"R2", R2}, {"T2", T2}, {"unitarity_error", unitarity}};
        if (free_point) {
            // eta = e^{ikx} + beta e^{ik|x-a|}, beta = (i/(2ck)) / (1/alpha - i/(2ck)).
            const Complex g(0.0, 1.0 / (2.0 * c * std::abs(k)));
            const Complex beta = g / (1.0 / alpha - g);
            const double dev = std::max(std::abs(R2 - std::norm(beta)), std::abs(T2 - std::norm(1.0 + beta)));
            row["closed_form_deviation"] = dev;
            closed = std::max(closed, dev);
        }
        samples.push_back(row);
        table.add({k, R2, T2});
    }
    ctx.csv[""] = table.str();
    doc["samples"] = samples;
    doc["max_unitarity_error"] = worst;
    if (free_point) doc["max_closed_form_deviation"] = closed;
    return doc;
}

Json cmd_secular(Context& ctx) {
    const BaseProblem& p = *ctx.problem;
    const std::string kind = perturbation_kind(ctx);
    const Window window = window_from(ctx);
    const double band = ctx.cfg.number("solver", "band", 0.0);
    const long count = ctx.cfg.integer("solver", "grid_points", 400);
    if (count < 0) throw ConfigError("solver.grid_points must be non-negative");
    const bool empty = !(window.emin < window.emax);

    // Value of the secular function and its poles.
    std::function<double(double)> value;
    std::vector<SecularPole> poles;
    std::string column = "phi";
    std::vector<BoundState> roots;
    if (kind == "point") {
        const PointPerturbation pert = point_perturbation(ctx, alpha_list(ctx).front());
        value = [&, pert](double E) { return phi(p, pert, E, ctx.tol); };
        if (!empty) {
            poles = secular_poles(p, pert.a, window.emax);
            roots = find_bound_states(p, pert, window, ctx.tol);
        }
    } else if (kind == "renormalized") {
        const RenormalizedPerturbation r = renormalized_perturbation(ctx);
        value = [&, r](double E) { return phi_renormalized(p, r, E, ctx.tol); };
        if (!empty) {
            poles = secular_poles(p, r.a, window.emax);
            roots = find_bound_states_renormalized(p, r, window, ctx.tol);
        }
    } else if (kind == "centers") {
        const CenterSet centers = center_set(ctx);
        column = "det_phi";
        value = [&, centers](double E) { return phi_matrix(p, centers, E, ctx.tol).matrix.determinant().real(); };
        if (!empty) {
            for (const EnergyLevel& lvl : p.levels_up_to(window.emax)) {
                SecularPole pole;
                pole.energy = lvl.energy;
                pole.level = lvl.index;
                pole.node = std::all_of(centers.points().begin(), centers.points().end(),
                                        [&](Point a) { return is_node(p, lvl.index, a); });
                pole.guard = 2.0 * pole_guard(p, lvl.index);
                poles.push_back(pole);
            }
            MulticenterOptions opts;
            opts.cross_check = false;
            roots = find_bound_states_multicenter(p, centers, window, ctx.tol, opts);
        }
    } else {
        const CurveSupport curve = curve_from(ctx);
        const double alpha = alpha_list(ctx).front();
        value = [&, curve, alpha](double E) { return 1.0 / alpha - curve_diagonal(p, curve, E, ctx.tol).value; };
        if (!empty) {
            for (const CurveBoundState& s : find_bound_states_curve(p, curve, alpha, window, ctx.tol, false))
                roots.push_back(s.state);
        }
    }

    CsvTable table({"E", column});
    std::size_t dropped = 0;
    std::vector<std::pair<double, double>> samples;
    if (!empty) {
        for (double E : linspace(window.emin, window.emax, static_cast<std::size_t>(count))) {
            const bool guarded = std::any_of(poles.begin(), poles.end(), [&](const SecularPole& q) {
                return !q.node && std::abs(E - q.energy) <= std::max(q.guard, band);
            });
            if (guarded) {
                ++dropped;
                continue;
            }
            try {
                const double v = value(E);
                if (!std::isfinite(v)) {
                    ++dropped;
                    continue;
                }
                samples.emplace_back(E, v);
                table.add({E, v});
            } catch (const SolverError& e) {
                if (!skippable(e)) throw;
                ++dropped;
            }
        }
    }
    ctx.csv[""] = table.str();

    // Downward crossings bracket roots; a pole with no sample inside does not count.
    Json brackets = Json::array();
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const auto [e0, v0] = samples[i - 1];
        const auto [e1, v1] = samples[i];
        const bool pole_between = std::any_of(poles.begin(), poles.end(), [&](const SecularPole& q) {
            return !q.node && q.energy > e0 && q.energy < e1;
        });
        if (pole_between) continue;
        if ((v0 > 0.0) != (v1 > 0.0)) brackets.push_back({e0, e1});
    }
    Json pole_list = Json::array();
    for (const SecularPole& q : poles)
        pole_list.push_back({{"E", q.energy}, {"level", q.level}, {"node", q.node}, {"guard", std::max(q.guard, band)}});
    Json root_list = Json::array();
    for (const BoundState& s : roots)
        if (s.kind == StateKind::Shifted) root_list.push_back(s.energy);

    Json side{{"poles", pole_list}, {"dropped", dropped}, {"roots", root_list}, {"sign_changes", brackets}};
    ctx.sidecars["poles"] = side;
    Json doc = side;
    if (kind != "curve") doc["perturbation"] = perturbation_json(ctx, kind);
    doc["window"] = {window.emin, window.emax};
    doc["column"] = column;
    doc["samples"] = samples.size();
    return doc;
}

}  // namespace krein::app
