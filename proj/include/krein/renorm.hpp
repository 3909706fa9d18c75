#pragma once

#include <vector>

#include "krein/greens.hpp"
#include "krein/krein.hpp"

namespace krein {

// Renormalized point interaction: 1/alpha_R at scale mu2 (M = -mu2).
struct RenormalizedPerturbation {
    Point a;
    double inv_alpha_r = 0.0;
    double mu2 = 1.0;
};

// S(E) = sum |phi_n(a)|^2 (E + mu2) / ((E_n - E)(E_n + mu2)) + continuum analogue.
GreenEvaluation subtracted_diagonal(const BaseProblem& problem, Point a, Complex E, double mu2, double tol);

// Level-k-excluded part of S at E = E_k. power 1: C_R - |phi_k(a)|^2 / (E_k + mu2)
// with C_R = sum_{n != k} |phi_n(a)|^2 (E_k + mu2) / ((E_n - E_k)(E_n + mu2));
// power 2: its E-derivative, sum_{n != k} |phi_n(a)|^2 / (E_n - E_k)^2.
GreenEvaluation subtracted_regular(const BaseProblem& problem, std::size_t k, Point a, double mu2, double tol,
                                   int power = 1, RegularMethod method = RegularMethod::Automatic);

// Phi_R(E) = 1/alpha_R - S(E).
double phi_renormalized(const BaseProblem& problem, const RenormalizedPerturbation& rpert, double E, double tol);

std::vector<BoundState> find_bound_states_renormalized(const BaseProblem& problem,
                                                       const RenormalizedPerturbation& rpert, Window window,
                                                       double tol);

Complex full_green_renormalized(const BaseProblem& problem, const RenormalizedPerturbation& rpert, Point x,
                                Point y, Complex E, double tol);

// 1/alpha_R at mu2_to giving the same Phi_R(E) for all E.
double coupling_flow(const BaseProblem& problem, Point a, double inv_alpha_r, double mu2_from, double mu2_to,
                     double tol = 1e-12);

}  // namespace krein
