#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "krein/krein.hpp"

namespace krein {

// Distinct support points with their couplings; separation >= 1e-9.
class CenterSet {
public:
    CenterSet(std::vector<Point> points, std::vector<double> alphas);

    std::size_t size() const { return points_.size(); }
    const std::vector<Point>& points() const { return points_; }
    const std::vector<double>& alphas() const { return alphas_; }
    Point point(std::size_t i) const { return points_[i]; }
    double alpha(std::size_t i) const { return alphas_[i]; }
    // The first n centers.
    CenterSet prefix(std::size_t n) const;

    static constexpr double kMinSeparation = 1e-9;

private:
    std::vector<Point> points_;
    std::vector<double> alphas_;
};

struct PrincipalMatrix {
    Eigen::MatrixXcd matrix;  // (1/alpha_i) delta_ij - G0(a_i, a_j | E)
    Complex energy{};
    double condition = 0.0;   // ratio of extreme singular values
};

PrincipalMatrix phi_matrix(const BaseProblem& problem, const CenterSet& centers, Complex E, double tol);

struct MulticenterOptions {
    bool cross_check = true;              // run the one-center-at-a-time recursion as well
    bool throw_on_ill_conditioned = false;
};

struct MulticenterReport {
    std::vector<double> recursive;        // energies from the recursion (when cross_check)
    double max_deviation = 0.0;           // max |determinant root - recursive root|
    bool consistent = true;               // same count and max_deviation <= max(1e-8, 1e3 tol)
    std::vector<double> conditions;       // per shifted state, see find_bound_states_multicenter
};

// Roots of det Phi(E) located by counting negative eigenvalues of the Hermitian
// Phi(E) on a grid of 200 points per unit energy and bisecting the jumps.
// Each state's condition is max|lambda| / second smallest |lambda| at E*; a
// value above 1e12 marks an unresolved cluster (IllConditioned when requested).
std::vector<BoundState> find_bound_states_multicenter(const BaseProblem& problem, const CenterSet& centers,
                                                      Window window, double tol,
                                                      MulticenterOptions options = {},
                                                      MulticenterReport* report = nullptr);

// Adds the centers one at a time: the j-th center sees the Green's function of
// the first j-1 centers. Returns the sorted energies in the window.
std::vector<double> recursive_bound_states(const BaseProblem& problem, const CenterSet& centers, Window window,
                                           double tol);

Complex full_green_multicenter(const BaseProblem& problem, const CenterSet& centers, Point x, Point y, Complex E,
                               double tol);

// eta(x) = chi_k(x) + sum_ij G0(x, a_i | E+i0) [Phi(E+i0)^-1]_ij chi_k(a_j); 1D problems also
// get R and T from the far field.
ScatteringState generalized_eigenfunction_multicenter(const BaseProblem& problem, const CenterSet& centers,
                                                      double k, double tol);

}  // namespace krein
