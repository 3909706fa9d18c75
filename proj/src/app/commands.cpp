#include "krein/app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <random>

#include "context.hpp"
#include "krein/catalog.hpp"

namespace krein::app {

namespace {

struct Entry {
    const char* name;
    Command fn;
};

const std::vector<Entry>& table() {
    static const std::vector<Entry> t = {
        {"spectrum", cmd_spectrum}, {"green", cmd_green},     {"perturb", cmd_perturb},
        {"scatter", cmd_scatter},   {"renorm", cmd_renorm},   {"multicenter", cmd_multicenter},
        {"curve", cmd_curve},       {"secular", cmd_secular},
    };
    return t;
}

double positive(const Config& cfg, const std::string& section, const std::string& key, double fallback) {
    const double v = cfg.number(section, key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(section + "." + key + " must be positive");
    return v;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string output_dir(const Config& cfg, const RunOptions& options) {
    if (!options.out_dir.empty()) return options.out_dir;
    if (cfg.has("output", "dir")) return cfg.text("output", "dir", ".");
    if (const char* env = std::getenv("KREIN_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const Entry& e : table()) out.emplace_back(e.name);
        return out;
    }();
    return names;
}

ProblemPtr build_problem(const Config& cfg) {
    Units units;
    units.hbar = positive(cfg, "problem", "hbar", 1.0);
    units.mass = positive(cfg, "problem", "mass", 0.5);
    const std::string type = cfg.text("problem", "type", "");
    if (type == "free-line") return make_free_line(units);
    if (type == "reflectionless") return make_reflectionless(positive(cfg, "problem", "kappa", 1.0), units);
    if (type == "harmonic") return make_harmonic_oscillator(positive(cfg, "problem", "omega", 1.0), units);
    if (type == "torus") {
        const long cap = cfg.integer("problem", "mode_cap", 40000);
        if (cap < 16) throw ConfigError("problem.mode_cap must be at least 16");
        return make_flat_torus(positive(cfg, "problem", "L1", 2.0 * kPi), positive(cfg, "problem", "L2", 2.0 * kPi),
                               units, static_cast<std::size_t>(cap));
    }
    if (type == "free-plane") return make_free_plane(units);
    if (type.empty()) throw ConfigError("problem.type is required");
    throw ConfigError("unknown problem.type '" + type +
                      "' (expected free-line, reflectionless, harmonic, torus or free-plane)");
}

// ---- helpers shared by the subcommands ----

Json problem_json(const BaseProblem& problem, const Config& cfg) {
    Json j;
    j["type"] = problem.label();
    j["dimension"] = problem.dimension();
    j["hbar"] = problem.units().hbar;
    j["mass"] = problem.units().mass;
    if (const auto* r = dynamic_cast<const Reflectionless*>(&problem)) j["kappa"] = r->kappa();
    if (const auto* h = dynamic_cast<const HarmonicOscillator*>(&problem)) j["omega"] = h->omega();
    if (const auto* t = dynamic_cast<const FlatTorus*>(&problem)) {
        j["L1"] = t->L1();
        j["L2"] = t->L2();
        j["mode_cap"] = cfg.integer("problem", "mode_cap", 40000);
    }
    return j;
}

Json point_json(Point p, int dimension) { return dimension == 1 ? Json::array({p.x}) : Json::array({p.x, p.y}); }

Json state_json(const BoundState& s) {
    Json j;
    j["k"] = s.level ? Json(*s.level) : Json(nullptr);
    j["E_old"] = number(s.old_energy);
    j["E_star"] = s.energy;
    j["kind"] = std::string(to_string(s.kind));
    j["bracket"] = Json::array({number(s.lo), number(s.hi)});
    j["multiplicity"] = s.multiplicity;
    j["residual"] = number(s.residual);
    if (s.kind == StateKind::Shifted) j["normalization"] = number(s.normalization);
    return j;
}

Point support_from(const Context& ctx) { return ctx.cfg.point("perturbation", "support", Point{}); }

std::string perturbation_kind(const Context& ctx) {
    const std::string kind = ctx.cfg.text("perturbation", "kind", "point");
    if (kind != "point" && kind != "renormalized" && kind != "centers" && kind != "curve")
        throw ConfigError("perturbation.kind must be point, renormalized, centers or curve");
    return kind;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out;
    if (n == 0) return out;
    if (n == 1) return {a};
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(a + (b - a) * double(i) / double(n - 1));
    return out;
}

std::vector<double> uniform_draws(std::uint64_t seed, std::size_t count, double lo, double hi) {
    // Explicit 53-bit mapping so the sequence does not depend on the standard library.
    std::mt19937_64 gen(seed);
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double u = double(gen() >> 11) * 0x1.0p-53;  // [0, 1)
        out.push_back(hi - (hi - lo) * u);                 // (lo, hi]
    }
    return out;
}

std::vector<double> alpha_list(const Context& ctx) {
    const long count = ctx.cfg.integer("solver", "random_alphas", 0);
    if (count < 0) throw ConfigError("solver.random_alphas must be non-negative");
    std::vector<double> alphas;
    if (count > 0) {
        const double lo = ctx.cfg.number("solver", "alpha_min", 0.0);
        const double hi = ctx.cfg.number("solver", "alpha_max", 10.0);
        if (!(hi > lo)) throw ConfigError("solver.alpha_max must exceed solver.alpha_min");
        const auto seed = static_cast<std::uint64_t>(ctx.cfg.integer("solver", "seed", 1));
        alphas = uniform_draws(seed, static_cast<std::size_t>(count), lo, hi);
    } else {
        alphas = ctx.cfg.numbers("perturbation", "alpha", {1.0});
    }
    if (ctx.cfg.flag("solver", "repulsive", false))
        for (double& a : alphas) a = -std::abs(a);
    for (double a : alphas)
        if (a == 0.0 || !std::isfinite(a)) throw ConfigError("couplings must be nonzero and finite");
    if (alphas.empty()) throw ConfigError("perturbation.alpha is empty");
    return alphas;
}

PointPerturbation point_perturbation(const Context& ctx, double alpha) {
    PointPerturbation p;
    p.a = support_from(ctx);
    p.alpha = alpha;
    return p;
}

RenormalizedPerturbation renormalized_perturbation(const Context& ctx) {
    RenormalizedPerturbation r;
    r.a = support_from(ctx);
    r.inv_alpha_r = ctx.cfg.number("perturbation", "inv_alpha_r", 0.0);
    r.mu2 = ctx.cfg.number("perturbation", "mu2", 1.0);
    if (!(r.mu2 > 0.0)) throw ConfigError("perturbation.mu2 must be positive");
    return r;
}

CenterSet center_set(const Context& ctx) {
    std::vector<Point> pts = ctx.cfg.points("perturbation", "centers");
    std::vector<double> alphas = ctx.cfg.numbers("perturbation", "alphas");
    if (pts.empty()) throw ConfigError("perturbation.centers is required for kind = centers");
    if (alphas.empty()) alphas = ctx.cfg.numbers("perturbation", "alpha", {1.0});
    if (alphas.size() == 1 && pts.size() > 1) alphas.assign(pts.size(), alphas.front());
    if (alphas.size() != pts.size()) throw ConfigError("perturbation.alphas must match perturbation.centers");
    return CenterSet(std::move(pts), std::move(alphas));
}

CurveSupport curve_from(const Context& ctx) {
    const Config& c = ctx.cfg;
    const std::string type = c.text("perturbation", "curve", "circle");
    const Point center = c.point("perturbation", "center", Point{});
    if (type == "circle")
        return CurveSupport::circle(center, c.number("perturbation", "radius", 1.0),
                                    static_cast<int>(c.integer("perturbation", "order", 128)));
    if (type == "ellipse")
        return CurveSupport::ellipse(center, c.number("perturbation", "semi_a", 1.0),
                                     c.number("perturbation", "semi_b", 1.0),
                                     static_cast<int>(c.integer("perturbation", "order", 128)));
    if (type == "polyline")
        return CurveSupport::polyline(c.points("perturbation", "vertices"), c.flag("perturbation", "closed", true),
                                      static_cast<int>(c.integer("perturbation", "order", 12)));
    throw ConfigError("perturbation.curve must be circle, ellipse or polyline");
}

Window window_from(const Context& ctx) {
    const BaseProblem& p = *ctx.problem;
    Window w;
    const double inf = p.continuum_infimum();
    if (auto v = ctx.cfg.optional_number("solver", "emax")) {
        w.emax = *v;
    } else if (std::isfinite(inf)) {
        w.emax = inf;
    } else {
        w.emax = 0.5 * (p.level(10).energy + p.level(11).energy);
    }
    if (auto v = ctx.cfg.optional_number("solver", "emin")) {
        w.emin = *v;
    } else {
        // Below the deepest single-centre well for the strongest configured coupling.
        double strongest = 1.0;
        for (double a : ctx.cfg.numbers("perturbation", "alpha", {1.0})) strongest = std::max(strongest, std::abs(a));
        for (double a : ctx.cfg.numbers("perturbation", "alphas")) strongest = std::max(strongest, std::abs(a));
        if (ctx.cfg.integer("solver", "random_alphas", 0) > 0)
            strongest = std::max(strongest, std::abs(ctx.cfg.number("solver", "alpha_max", 10.0)));
        const double bottom = p.level_count() > 0 ? std::min(inf, p.level(0).energy) : inf;
        const double depth = strongest * strongest / (4.0 * p.kinetic());
        w.emin = (std::isfinite(bottom) ? bottom : 0.0) - 2.0 * (1.0 + depth);
    }
    return w;
}

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    if (lx.size() < 2) return std::nullopt;
    const double n = double(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

// ---- driver ----

RunResult run_command(const std::string& command, const Config& config, const RunOptions& options) {
    namespace fs = std::filesystem;
    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    Json doc;
    doc["command"] = command;
    doc["version"] = kVersion;
    doc["config"] = config.entries();

    std::string dir;
    std::string name;
    bool deterministic = options.deterministic;
    try {
        const auto it = std::find_if(table().begin(), table().end(),
                                     [&](const Entry& e) { return command == e.name; });
        if (it == table().end()) throw ConfigError("unknown command '" + command + "'");
        dir = output_dir(config, options);
        name = config.text("output", "name", command);
        if (name.empty() || name.find('/') != std::string::npos)
            throw ConfigError("output.name must be a plain file stem");
        deterministic = deterministic || config.flag("output", "deterministic", false);
        const double tol = config.number("solver", "tol", 1e-12);
        if (!(tol > 0.0)) throw ConfigError("solver.tol must be positive");

        Context ctx{config, build_problem(config), tol, {}, {}};
        Json body = it->fn(ctx);
        doc["problem"] = problem_json(*ctx.problem, config);
        doc.update(body);
        doc["status"] = "ok";
        for (const auto& [suffix, contents] : ctx.csv) {
            const std::string path = (fs::path(dir) / (name + (suffix.empty() ? "" : "_" + suffix) + ".csv")).string();
            write_atomic(path, contents);
            result.files.push_back(path);
        }
        for (const auto& [suffix, side] : ctx.sidecars) {
            const std::string path = (fs::path(dir) / (name + "_" + suffix + ".json")).string();
            write_atomic(path, dump(side));
            result.files.push_back(path);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        result.exit_code = 1;
        return result;
    } catch (const SolverError& e) {
        result.exit_code = 2;
        doc["status"] = "error";
        doc["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    } catch (const std::exception& e) {
        result.exit_code = 2;
        doc["status"] = "error";
        doc["error"] = {{"code", "Internal"}, {"message", e.what()}};
    }
    if (!deterministic) {
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        doc["run"] = {{"timestamp", utc_timestamp()}, {"wall_time_s", wall}};
    }
    const std::string path = (fs::path(dir) / (name + ".json")).string();
    try {
        write_atomic(path, dump(doc));
        result.files.insert(result.files.begin(), path);
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << "\n";
        if (result.exit_code == 0) result.exit_code = 2;
    }
    if (doc.contains("error")) std::cerr << "solver error: " << doc["error"]["message"].get<std::string>() << "\n";
    if (!options.quiet) std::cout << dump(doc);
    result.document = std::move(doc);
    return result;
}

}  // namespace krein::app
