// kreinctl: batch front-end for the krein library.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "krein/app/commands.hpp"
#include "krein/app/config.hpp"

namespace {

struct Flags {
    std::string config;
    std::vector<std::string> sets;
    std::optional<std::string> problem;
    std::optional<std::string> kappa, omega, alpha, support, mu2, inv_alpha_r, emin, emax, tol, level;
    std::string out_dir;
    bool deterministic = false;
    bool quiet = false;
};

void apply(krein::app::Config& cfg, const Flags& f) {
    auto put = [&cfg](const char* section, const char* key, const std::optional<std::string>& v) {
        if (v) cfg.set(section, key, *v);
    };
    put("problem", "type", f.problem);
    put("problem", "kappa", f.kappa);
    put("problem", "omega", f.omega);
    put("perturbation", "alpha", f.alpha);
    put("perturbation", "support", f.support);
    put("perturbation", "mu2", f.mu2);
    put("perturbation", "inv_alpha_r", f.inv_alpha_r);
    put("solver", "emin", f.emin);
    put("solver", "emax", f.emax);
    put("solver", "tol", f.tol);
    put("solver", "level", f.level);
    for (const std::string& s : f.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw krein::app::ConfigError("--set expects section.key=value, got '" + s + "'");
        cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    // A coupling renormalized at a scale implies the renormalized kind unless stated.
    if ((f.mu2 || f.inv_alpha_r) && !cfg.has("perturbation", "kind")) cfg.set("perturbation", "kind", "renormalized");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Point and curve interactions through Krein's resolvent formula"};
    app.require_subcommand(1);
    app.footer(
        "Curve couplings use the averaged pairing <Gamma|psi> = (1/L) int psi ds,\n"
        "so alpha on a curve is relative to the length-normalized kernel.\n"
        "Config grammar and output formats: docs/config.md. KREIN_OUTPUT_DIR sets the default output directory.");

    Flags flags;
    for (const std::string& name : krein::app::command_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("-c,--config", flags.config, "config file");
        sub->add_option("--set", flags.sets, "override section.key=value (repeatable)");
        sub->add_option("--problem", flags.problem, "free-line, reflectionless, harmonic, torus or free-plane");
        sub->add_option("--kappa", flags.kappa, "reflectionless well parameter");
        sub->add_option("--omega", flags.omega, "oscillator frequency");
        sub->add_option("--alpha", flags.alpha, "coupling, or a comma separated list");
        sub->add_option("--support", flags.support, "support point 'x' or 'x, y'");
        sub->add_option("--mu2", flags.mu2, "renormalization scale");
        sub->add_option("--inv-alpha-r", flags.inv_alpha_r, "renormalized inverse coupling");
        sub->add_option("--emin", flags.emin, "window floor");
        sub->add_option("--emax", flags.emax, "window ceiling");
        sub->add_option("--tol", flags.tol, "solver tolerance");
        sub->add_option("--level", flags.level, "level index for perturb");
        sub->add_option("--out-dir", flags.out_dir, "output directory");
        sub->add_flag("--deterministic", flags.deterministic, "omit timestamp and wall time");
        sub->add_flag("-q,--quiet", flags.quiet, "do not print the result document");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    krein::app::Config cfg;
    try {
        if (!flags.config.empty()) cfg = krein::app::Config::load(flags.config);
        apply(cfg, flags);
    } catch (const krein::app::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    krein::app::RunOptions options;
    options.out_dir = flags.out_dir;
    options.deterministic = flags.deterministic;
    options.quiet = flags.quiet;
    return krein::app::run_command(command, cfg, options).exit_code;
}
