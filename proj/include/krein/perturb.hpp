#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "krein/krein.hpp"
#include "krein/renorm.hpp"

namespace krein {

struct EnergyCorrections {
    std::size_t k = 0;
    double E0 = 0.0;
    double E1 = 0.0;
    double E2 = 0.0;
    double theta = 0.0;   // arg phi_k(a)
    double guard = 0.0;   // |E1| / distance to the nearest other level or edge
    bool reliable = true; // guard < 1
};

struct WavefunctionValues {
    Complex psi0{};
    Complex psi1{};
    Complex psi2{};
};

struct PerturbationResult {
    EnergyCorrections energies;
    std::function<Complex(Point)> psi0;
    std::function<Complex(Point)> psi1;
    std::function<Complex(Point)> psi2;
};

// E1 = -alpha |phi_k(a)|^2, E2 = -alpha^2 |phi_k(a)|^2 * (sum_{n != k} |phi_n(a)|^2 / (E_n - E_k) + continuum).
// cutoff: on a 2D problem the sum diverges; a finite cutoff keeps modes with E_n <= cutoff.
EnergyCorrections energy_corrections(const BaseProblem& problem, const PointPerturbation& pert, std::size_t k,
                                     double tol, std::optional<double> cutoff = std::nullopt);

// Orders 0, 1, 2 of the bound-state wavefunction at x (phase e^{-i theta + i pi}).
WavefunctionValues wavefunction_corrections(const BaseProblem& problem, const PointPerturbation& pert,
                                            std::size_t k, Point x, double tol);

EnergyCorrections energy_corrections_renormalized(const BaseProblem& problem, const RenormalizedPerturbation& rpert,
                                                  std::size_t k, double tol);

WavefunctionValues wavefunction_corrections_renormalized(const BaseProblem& problem,
                                                         const RenormalizedPerturbation& rpert, std::size_t k,
                                                         Point x, double tol);

PerturbationResult perturbation_series(const BaseProblem& problem, const PointPerturbation& pert, std::size_t k,
                                       double tol);
PerturbationResult perturbation_series_renormalized(const BaseProblem& problem,
                                                    const RenormalizedPerturbation& rpert, std::size_t k,
                                                    double tol);

// The rank-one problem restricted to the first N modes. Everything is exact
// within the truncated space, so series and exact roots compare consistently.
class TruncatedModel {
public:
    TruncatedModel(const BaseProblem& problem, Point a, std::size_t modes);

    std::size_t size() const { return energies_.size(); }
    double phi_regular(double E, double alpha) const;
    double phi_renormalized(double E, double inv_alpha_r, double mu2) const;
    // Root attached to level k (the gap below it when attach_above).
    double root(const std::function<double(double)>& f, std::size_t k, bool attach_above, double tol) const;
    // Normalized residue wavefunction coefficients <phi_n, psi> at E*.
    std::vector<Complex> residue(double Estar) const;
    // Coefficients of psi0, psi1, psi2 for mode k; s1 is the first-order regular
    // sum entering psi2 (regular: S1; renormalized: C_R - |phi_k|^2/(E_k + mu2)).
    std::array<std::vector<Complex>, 3> series(std::size_t k, double alpha, double s1) const;
    double regular_sum(std::size_t k, int power) const;
    double renormalized_sum(std::size_t k, double mu2) const;

private:
    std::vector<double> energies_;
    std::vector<Complex> values_;  // phi_n(a)
};

// min over theta of || u - e^{i theta} v ||_2.
double phase_aligned_distance(const std::vector<Complex>& u, const std::vector<Complex>& v);

}  // namespace krein
