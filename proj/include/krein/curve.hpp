#pragma once

#include <cstddef>
#include <vector>

#include "krein/krein.hpp"

namespace krein {

enum class CurveKind { Circle, Ellipse, Polyline };

// A curve gamma: [0, 1] -> plane. Closed analytic curves use a periodic
// trapezoid grid of `order` nodes; polylines use `order` Gauss points per panel.
class CurveSupport {
public:
    static CurveSupport circle(Point center, double radius, int order = 128);
    static CurveSupport ellipse(Point center, double a, double b, int order = 128);
    static CurveSupport polyline(std::vector<Point> vertices, bool closed, int order = 12);

    CurveKind kind() const { return kind_; }
    bool closed() const { return closed_; }
    int order() const { return order_; }
    CurveSupport with_order(int order) const;
    double length() const { return length_; }

    Point point(double t) const;
    Point derivative(double t) const;  // d gamma / dt
    double speed(double t) const;

    // Closed curves: rotates the parameter origin by `shift` (same curve, same orientation).
    CurveSupport reparametrized(double shift) const;

    const std::vector<Point>& vertices() const { return vertices_; }
    Point center() const { return center_; }
    // Parameters of polyline vertices (empty for smooth curves).
    std::vector<double> kink_parameters() const;
    // Largest distance of a curve point from center().
    double extent() const;

private:
    CurveSupport() = default;
    void finish();
    double arclength_by_quadrature(int nodes) const;

    CurveKind kind_ = CurveKind::Circle;
    bool closed_ = true;
    int order_ = 128;
    Point center_;
    double a_ = 1.0;  // radius or semi-axes
    double b_ = 1.0;
    double shift_ = 0.0;
    std::vector<Point> vertices_;
    std::vector<double> cumulative_;  // polyline arclength at vertices
    double length_ = 0.0;
};

struct CurveValue {
    double value = 0.0;
    double error = 0.0;
    int order = 0;
};

// G0(x, Gamma | E) = (1/L) int G0(x, gamma(s) | E) ds for real E below the spectrum.
CurveValue curve_kernel(const BaseProblem& problem, const CurveSupport& curve, Point x, double E, double tol);

// G0(Gamma, Gamma | E) = (1/L^2) double integral; error from doubling the order.
// QuadratureFailure when the estimate stays above tol up to the order cap.
CurveValue curve_diagonal(const BaseProblem& problem, const CurveSupport& curve, double E, double tol);

// d/dE G0(Gamma, Gamma | E) = || G0(., Gamma | E) ||^2.
CurveValue curve_diagonal_derivative(const BaseProblem& problem, const CurveSupport& curve, double E, double tol);

// Fixed-order evaluations (no refinement), used for the order-doubling checks.
double curve_diagonal_at_order(const BaseProblem& problem, const CurveSupport& curve, double E);
double curve_diagonal_derivative_at_order(const BaseProblem& problem, const CurveSupport& curve, double E);

struct CurveBoundState {
    BoundState state;
    int order = 0;              // quadrature order the root was solved at
    double root_shift = 0.0;    // |E*(order) - E*(2 order)|
    double disk_norm = 0.0;     // int |psi|^2 by 2D quadrature with the tail correction
    double disk_tail = 0.0;     // tail contribution beyond the disk
};

// Root of 1/alpha - G0(Gamma, Gamma | E) in the window; psi = N G0(x, Gamma | E*),
// N = (dG0(Gamma,Gamma|E*)/dE)^(-1/2).
std::vector<CurveBoundState> find_bound_states_curve(const BaseProblem& problem, const CurveSupport& curve,
                                                     double alpha, Window window, double tol,
                                                     bool disk_check = true);

// int |f|^2 over the plane: polar quadrature on a disk around the curve plus an
// exponential tail fitted to the free-plane decay K0(q r)^2.
struct DiskNorm {
    double disk = 0.0;
    double tail = 0.0;
    double total() const { return disk + tail; }
};
DiskNorm disk_norm(const std::function<double(Point)>& density, Point center, double inner_radius, double E,
                   double kinetic, double tol);

}  // namespace krein
