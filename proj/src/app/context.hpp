#pragma once

// Shared plumbing for the subcommand implementations.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "krein/app/commands.hpp"
#include "krein/curve.hpp"
#include "krein/krein.hpp"
#include "krein/multicenter.hpp"
#include "krein/renorm.hpp"

namespace krein::app {

struct Context {
    const Config& cfg;
    ProblemPtr problem;
    double tol = 1e-12;
    std::map<std::string, std::string> csv;  // suffix -> contents; "" is <name>.csv
    std::map<std::string, Json> sidecars;    // suffix -> extra JSON document
};

using Command = Json (*)(Context&);

Json cmd_spectrum(Context& ctx);
Json cmd_green(Context& ctx);
Json cmd_scatter(Context& ctx);
Json cmd_secular(Context& ctx);
Json cmd_perturb(Context& ctx);
Json cmd_renorm(Context& ctx);
Json cmd_multicenter(Context& ctx);
Json cmd_curve(Context& ctx);

// Helpers.
Json problem_json(const BaseProblem& problem, const Config& cfg);
Json point_json(Point p, int dimension);
Json state_json(const BoundState& s);
Window window_from(const Context& ctx);
Point support_from(const Context& ctx);
std::string perturbation_kind(const Context& ctx);
PointPerturbation point_perturbation(const Context& ctx, double alpha);
RenormalizedPerturbation renormalized_perturbation(const Context& ctx);
CenterSet center_set(const Context& ctx);
CurveSupport curve_from(const Context& ctx);
// Couplings from perturbation.alpha, or a seeded uniform draw in (alpha_min, alpha_max].
std::vector<double> alpha_list(const Context& ctx);
std::vector<double> uniform_draws(std::uint64_t seed, std::size_t count, double lo, double hi);
// Least-squares slope of log y against log x over the finite, positive pairs.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace krein::app
