#include "krein/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "krein/catalog.hpp"
#include "krein/quadrature.hpp"
#include "krein/special.hpp"

namespace krein {

// ---------------------------------------------------------------------------
// CurveSupport

CurveSupport CurveSupport::circle(Point center, double radius, int order) {
    if (!(radius > 0.0) || !std::isfinite(radius)) fail(ErrorCode::InvalidArgument, "circle radius must be positive");
    CurveSupport c;
    c.kind_ = CurveKind::Circle;
    c.center_ = center;
    c.a_ = c.b_ = radius;
    c.order_ = order;
    c.finish();
    return c;
}

CurveSupport CurveSupport::ellipse(Point center, double a, double b, int order) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        fail(ErrorCode::InvalidArgument, "ellipse semi-axes must be positive");
    CurveSupport c;
    c.kind_ = CurveKind::Ellipse;
    c.center_ = center;
    c.a_ = a;
    c.b_ = b;
    c.order_ = order;
    c.finish();
    return c;
}

CurveSupport CurveSupport::polyline(std::vector<Point> vertices, bool closed, int order) {
    if (vertices.size() < (closed ? 3u : 2u))
        fail(ErrorCode::InvalidArgument, "polyline needs at least two vertices (three when closed)");
    CurveSupport c;
    c.kind_ = CurveKind::Polyline;
    c.closed_ = closed;
    c.vertices_ = std::move(vertices);
    if (closed) c.vertices_.push_back(c.vertices_.front());
    c.order_ = order;
    Point sum{};
    const std::size_t distinct = closed ? c.vertices_.size() - 1 : c.vertices_.size();
    for (std::size_t i = 0; i < distinct; ++i) {
        sum.x += c.vertices_[i].x;
        sum.y += c.vertices_[i].y;
    }
    c.center_ = {sum.x / static_cast<double>(distinct), sum.y / static_cast<double>(distinct)};
    c.finish();
    return c;
}

void CurveSupport::finish() {
    if (kind_ == CurveKind::Polyline) {
        if (order_ < 2) fail(ErrorCode::InvalidArgument, "polyline order must be at least 2");
        cumulative_.assign(1, 0.0);
        for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
            const double l = distance(vertices_[i], vertices_[i + 1]);
            if (!(l > 0.0)) fail(ErrorCode::InvalidArgument, "polyline has a zero-length segment");
            cumulative_.push_back(cumulative_.back() + l);
        }
        length_ = cumulative_.back();
    } else {
        if (order_ < 8 || order_ % 2 != 0) fail(ErrorCode::InvalidArgument, "closed-curve order must be even and >= 8");
        length_ = kind_ == CurveKind::Circle ? 2.0 * kPi * a_ : arclength_by_quadrature(8192);
    }
    const double check = arclength_by_quadrature(order_);
    if (std::abs(check - length_) > 1e-8 * length_)
        fail(ErrorCode::InvalidArgument, "quadrature order too low to reproduce the arclength");
}

double CurveSupport::arclength_by_quadrature(int nodes) const {
    if (kind_ == CurveKind::Polyline) {
        double sum = 0.0;
        for (std::size_t p = 0; p + 1 < cumulative_.size(); ++p) {
            const Point a = vertices_[p];
            const Point b = vertices_[p + 1];
            sum += quad::gauss_fixed([&](double) { return distance(a, b); }, 0.0, 1.0,
                                     static_cast<std::size_t>(nodes));
        }
        return sum;
    }
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) sum += speed(static_cast<double>(i) / nodes);
    return sum / nodes;
}

CurveSupport CurveSupport::with_order(int order) const {
    CurveSupport c = *this;
    c.order_ = order;
    if (kind_ == CurveKind::Polyline) {
        if (order < 2) fail(ErrorCode::InvalidArgument, "polyline order must be at least 2");
    } else if (order < 8 || order % 2 != 0) {
        fail(ErrorCode::InvalidArgument, "closed-curve order must be even and >= 8");
    }
    return c;
}

CurveSupport CurveSupport::reparametrized(double shift) const {
    if (!closed_) fail(ErrorCode::InvalidArgument, "only closed curves can be reparametrized by a shift");
    CurveSupport c = *this;
    c.shift_ = std::fmod(shift_ + shift, 1.0);
    return c;
}

Point CurveSupport::point(double t) const {
    if (kind_ != CurveKind::Polyline) {
        const double th = 2.0 * kPi * (t + shift_);
        return {center_.x + a_ * std::cos(th), center_.y + b_ * std::sin(th)};
    }
    double u = closed_ ? t + shift_ : t;
    if (closed_) u -= std::floor(u);
    const double s = std::clamp(u, 0.0, 1.0) * length_;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const std::size_t p = std::min<std::size_t>(static_cast<std::size_t>(std::max<std::ptrdiff_t>(
                                                    it - cumulative_.begin() - 1, 0)),
                                                cumulative_.size() - 2);
    const double f = (s - cumulative_[p]) / (cumulative_[p + 1] - cumulative_[p]);
    const Point a = vertices_[p];
    const Point b = vertices_[p + 1];
    return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
}

Point CurveSupport::derivative(double t) const {
    if (kind_ != CurveKind::Polyline) {
        const double th = 2.0 * kPi * (t + shift_);
        return {-2.0 * kPi * a_ * std::sin(th), 2.0 * kPi * b_ * std::cos(th)};
    }
    double u = closed_ ? t + shift_ : t;
    if (closed_) u -= std::floor(u);
    const double s = std::clamp(u, 0.0, 1.0) * length_;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const std::size_t p = std::min<std::size_t>(static_cast<std::size_t>(std::max<std::ptrdiff_t>(
                                                    it - cumulative_.begin() - 1, 0)),
                                                cumulative_.size() - 2);
    const Point a = vertices_[p];
    const Point b = vertices_[p + 1];
    const double l = cumulative_[p + 1] - cumulative_[p];
    return {length_ * (b.x - a.x) / l, length_ * (b.y - a.y) / l};
}

double CurveSupport::speed(double t) const {
    const Point d = derivative(t);
    return std::hypot(d.x, d.y);
}

std::vector<double> CurveSupport::kink_parameters() const {
    std::vector<double> out;
    if (kind_ != CurveKind::Polyline) return out;
    for (std::size_t i = 1; i + 1 < cumulative_.size(); ++i) {
        double t = cumulative_[i] / length_ - (closed_ ? shift_ : 0.0);
        if (closed_) t -= std::floor(t);
        out.push_back(t);
    }
    if (closed_) out.push_back(-shift_ - std::floor(-shift_));
    return out;
}

double CurveSupport::extent() const {
    if (kind_ != CurveKind::Polyline) return std::max(a_, b_);
    double r = 0.0;
    for (const Point& v : vertices_) r = std::max(r, distance(v, center_));
    return r;
}

// ---------------------------------------------------------------------------
// Kernels

namespace {

void check_problem(const BaseProblem& problem, double E) {
    if (problem.dimension() != 2) fail(ErrorCode::DimensionMismatch, "curve supports need a 2D base problem");
    if (!(E < problem.continuum_infimum()))
        fail(ErrorCode::CutViolation, "curve kernels need real E below the continuum");
}

const FreePlane& free_plane(const BaseProblem& problem) {
    const auto* plane = dynamic_cast<const FreePlane*>(&problem);
    if (!plane) fail(ErrorCode::Unsupported, problem.label() + ": curve diagonal is implemented on the free plane");
    return *plane;
}

double point_kernel(const BaseProblem& problem, const FreePlane* plane, Point x, Point y, double E, double tol) {
    if (plane) return plane->kernel(distance(x, y), E);
    return green0(problem, x, y, E, tol).value.real();
}

// Parameter of the curve point closest to x.
double closest_parameter(const CurveSupport& curve, Point x) {
    constexpr int kSamples = 1024;
    int best = 0;
    double dbest = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kSamples; ++i) {
        const double d = distance(curve.point(static_cast<double>(i) / kSamples), x);
        if (d < dbest) {
            dbest = d;
            best = i;
        }
    }
    double lo = (best - 1.0) / kSamples;
    double hi = (best + 1.0) / kSamples;
    if (!curve.closed()) {
        lo = std::max(lo, 0.0);
        hi = std::min(hi, 1.0);
    }
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 60; ++it) {
        const double m1 = hi - g * (hi - lo);
        const double m2 = lo + g * (hi - lo);
        if (distance(curve.point(m1), x) < distance(curve.point(m2), x))
            hi = m2;
        else
            lo = m1;
    }
    return 0.5 * (lo + hi);
}

// Fixed rule approximating (1/L) int f(gamma(t)) |gamma'(t)| dt with n nodes (per segment for polylines).
template <class F>
double fixed_curve_average(const CurveSupport& curve, int n, F&& f) {
    double sum = 0.0;
    if (curve.kind() != CurveKind::Polyline) {
        for (int i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / n;
            sum += f(curve.point(t)) * curve.speed(t);
        }
        return sum / n / curve.length();
    }
    const auto& v = curve.vertices();
    for (std::size_t p = 0; p + 1 < v.size(); ++p) {
        const double l = distance(v[p], v[p + 1]);
        sum += l * quad::gauss_fixed(
                       [&](double u) {
                           return f(Point{v[p].x + u * (v[p + 1].x - v[p].x), v[p].y + u * (v[p + 1].y - v[p].y)});
                       },
                       0.0, 1.0, static_cast<std::size_t>(n));
    }
    return sum / curve.length();
}

}  // namespace

CurveValue curve_kernel(const BaseProblem& problem, const CurveSupport& curve, Point x, double E, double tol) {
    check_problem(problem, E);
    const auto* plane = dynamic_cast<const FreePlane*>(&problem);
    auto g = [&](Point y) { return point_kernel(problem, plane, x, y, E, tol); };
    CurveValue out;
    const double tstar = closest_parameter(curve, x);
    const double dmin = distance(curve.point(tstar), x);
    const double h = curve.length() / curve.order();
    if (dmin > 4.0 * h) {
        const double v1 = fixed_curve_average(curve, curve.order(), g);
        const double v2 = fixed_curve_average(curve, 2 * curve.order(), g);
        if (std::abs(v2 - v1) <= std::max(tol, 1e-14) * std::max(1.0, std::abs(v2))) {
            out.value = v2;
            out.error = std::abs(v2 - v1);
            out.order = 2 * curve.order();
            return out;
        }
    }
    std::vector<double> breaks;
    if (curve.closed()) {
        breaks = {tstar, tstar + 1.0};
    } else {
        breaks = {0.0, tstar, 1.0};
    }
    for (double t : curve.kink_parameters()) {
        if (curve.closed()) t += std::ceil(tstar - t);
        if (t > breaks.front() && t < breaks.back()) breaks.push_back(t);
    }
    auto f = [&](double t) { return g(curve.point(t)) * curve.speed(t); };
    const auto r = quad::integrate(f, breaks, std::max(tol, 1e-14) * curve.length(), 1e-13);
    out.value = r.value / curve.length();
    out.error = r.error / curve.length();
    out.order = static_cast<int>(r.evaluations);
    return out;
}

namespace {

// Kress weights R_j for ln(4 sin^2((t - s)/2)) on 2n equispaced nodes.
std::vector<double> kress_weights(int two_n) {
    const int n = two_n / 2;
    std::vector<double> r(static_cast<std::size_t>(two_n));
    for (int j = 0; j < two_n; ++j) {
        const double tj = kPi * j / n;
        double s = 0.0;
        for (int m = 1; m < n; ++m) s += std::cos(m * tj) / m;
        r[static_cast<std::size_t>(j)] = -2.0 * kPi / n * s - kPi / (static_cast<double>(n) * n) * std::cos(n * tj);
    }
    return r;
}

// Closed analytic curve, free plane: power 0 gives G0(Gamma,Gamma), power 1 its E-derivative.
double kress_double_integral(const CurveSupport& curve, double E, double c, int derivative) {
    const int m = curve.order();
    const int n = m / 2;
    const double q = std::sqrt(-E / c);
    const std::vector<double> R = kress_weights(m);
    std::vector<Point> pts(static_cast<std::size_t>(m));
    std::vector<double> sp(static_cast<std::size_t>(m));  // |d gamma / d tau|, tau in [0, 2 pi)
    for (int i = 0; i < m; ++i) {
        const double t = static_cast<double>(i) / m;
        pts[static_cast<std::size_t>(i)] = curve.point(t);
        sp[static_cast<std::size_t>(i)] = curve.speed(t) / (2.0 * kPi);
    }
    const double h = kPi / n;
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        double inner = 0.0;
        for (int j = 0; j < m; ++j) {
            const int d = std::abs(i - j);
            const double w = R[static_cast<std::size_t>(d)];
            double log_coeff = 0.0;  // multiplies ln(4 sin^2)
            double smooth = 0.0;
            if (i == j) {
                if (derivative == 0) {
                    log_coeff = -0.5;
                    smooth = -std::log(q * sp[static_cast<std::size_t>(i)] / 2.0) - kEulerGamma;
                } else {
                    smooth = 1.0 / (2.0 * c * q * q);
                }
            } else {
                const double r = distance(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
                const double z = q * r;
                const double half_sin = 2.0 * std::abs(std::sin(0.5 * h * d));
                const double L = 2.0 * std::log(half_sin);
                if (derivative == 0) {
                    const double i0 = special::bessel_i0(z);
                    log_coeff = -0.5 * i0;
                    smooth = special::bessel_k0_regular(z) + i0 * (-std::log(q * (r / half_sin) / 2.0) - kEulerGamma);
                } else {
                    const double i1 = special::bessel_i1(z);
                    const double f = r / (2.0 * c * q);
                    log_coeff = 0.5 * f * i1;
                    smooth = f * (special::bessel_k1(z) - 0.5 * L * i1);
                }
            }
            inner += (w * log_coeff + h * smooth) * sp[static_cast<std::size_t>(j)];
        }
        total += h * sp[static_cast<std::size_t>(i)] * inner;
    }
    return total / (2.0 * kPi * c) / (curve.length() * curve.length());
}

// Breakpoints on [a, b] graded geometrically toward the flagged ends.
std::vector<double> graded(double a, double b, bool toward_a, bool toward_b) {
    constexpr int kLevels = 14;
    constexpr double kRatio = 0.15;
    std::vector<double> out{a, b};
    if (toward_a && toward_b) {
        const double m = 0.5 * (a + b);
        out.push_back(m);
        double w = 0.5 * (b - a);
        for (int k = 0; k < kLevels; ++k) {
            w *= kRatio;
            out.push_back(a + w);
            out.push_back(b - w);
        }
    } else if (toward_a || toward_b) {
        double w = b - a;
        for (int k = 0; k < kLevels; ++k) {
            w *= kRatio;
            out.push_back(toward_a ? a + w : b - w);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

template <class F>
double panel_sum(F&& f, const std::vector<double>& breaks, int order) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        s += quad::gauss_fixed(f, breaks[i], breaks[i + 1], static_cast<std::size_t>(order));
    return s;
}

// Polyline on the free plane: graded Gauss panels around the singular points.
double polyline_double_integral(const CurveSupport& curve, const FreePlane& plane, double E, int derivative) {
    const auto& v = curve.vertices();
    const std::size_t segments = v.size() - 1;
    const double c = plane.kinetic();
    const double q = std::sqrt(-E / c);
    const int order = curve.order();
    auto kernel = [&](double r) {
        if (derivative == 0) return special::bessel_k0(q * r) / (2.0 * kPi * c);
        return r * special::bessel_k1(q * r) / (2.0 * c * q) / (2.0 * kPi * c);
    };
    auto at = [&](std::size_t p, double u) {
        return Point{v[p].x + u * (v[p + 1].x - v[p].x), v[p].y + u * (v[p + 1].y - v[p].y)};
    };
    auto shares_start = [&](std::size_t p, std::size_t o) {  // segment p's start touches segment o
        return (o + 1 == p) || (curve.closed() && p == 0 && o == segments - 1);
    };
    auto shares_end = [&](std::size_t p, std::size_t o) {
        return (p + 1 == o) || (curve.closed() && p == segments - 1 && o == 0);
    };
    double total = 0.0;
    for (std::size_t p = 0; p < segments; ++p) {
        const double lp = distance(v[p], v[p + 1]);
        for (std::size_t o = 0; o < segments; ++o) {
            const double lo = distance(v[o], v[o + 1]);
            const bool same = p == o;
            const bool start = !same && shares_start(p, o);
            const bool end = !same && shares_end(p, o);
            auto inner = [&](double u) {
                const Point x = at(p, u);
                auto f = [&](double w) {
                    const double r = distance(x, at(o, w));
                    return r > 0.0 ? kernel(r) : 0.0;
                };
                if (same) {
                    std::vector<double> left = graded(0.0, u, false, true);
                    std::vector<double> right = graded(u, 1.0, true, false);
                    return panel_sum(f, left, order) + panel_sum(f, right, order);
                }
                // o's vertex nearest to segment p: start of o when p ends there, end of o otherwise.
                return panel_sum(f, graded(0.0, 1.0, end, start), order);
            };
            const std::vector<double> outer = graded(0.0, 1.0, true, true);
            total += lp * lo * panel_sum(inner, outer, order);
        }
    }
    return total / (curve.length() * curve.length());
}

}  // namespace

double curve_diagonal_at_order(const BaseProblem& problem, const CurveSupport& curve, double E) {
    check_problem(problem, E);
    const FreePlane& plane = free_plane(problem);
    if (curve.kind() == CurveKind::Polyline) return polyline_double_integral(curve, plane, E, 0);
    return kress_double_integral(curve, E, plane.kinetic(), 0);
}

double curve_diagonal_derivative_at_order(const BaseProblem& problem, const CurveSupport& curve, double E) {
    check_problem(problem, E);
    const FreePlane& plane = free_plane(problem);
    if (curve.kind() == CurveKind::Polyline) return polyline_double_integral(curve, plane, E, 1);
    return kress_double_integral(curve, E, plane.kinetic(), 1);
}

namespace {

constexpr int kMaxClosedOrder = 4096;
constexpr int kMaxPolylineOrder = 48;

CurveValue refine_order(const CurveSupport& curve, double tol,
                        const std::function<double(const CurveSupport&)>& eval) {
    const int cap = curve.kind() == CurveKind::Polyline ? kMaxPolylineOrder : kMaxClosedOrder;
    CurveSupport cur = curve;
    double prev = eval(cur);
    for (;;) {
        const int next = 2 * cur.order();
        if (next > cap) break;
        cur = cur.with_order(next);
        const double v = eval(cur);
        const double err = std::abs(v - prev);
        if (err <= tol * std::max(1.0, std::abs(v))) return {v, err, next};
        prev = v;
    }
    fail(ErrorCode::QuadratureFailure, "curve quadrature did not reach the tolerance by order doubling");
}

}  // namespace

CurveValue curve_diagonal(const BaseProblem& problem, const CurveSupport& curve, double E, double tol) {
    return refine_order(curve, tol, [&](const CurveSupport& c) { return curve_diagonal_at_order(problem, c, E); });
}

CurveValue curve_diagonal_derivative(const BaseProblem& problem, const CurveSupport& curve, double E, double tol) {
    return refine_order(curve, tol,
                        [&](const CurveSupport& c) { return curve_diagonal_derivative_at_order(problem, c, E); });
}

DiskNorm disk_norm(const std::function<double(Point)>& density, Point center, double inner_radius, double E,
                   double kinetic, double tol) {
    const double q = std::sqrt(-E / kinetic);
    const double Rd = inner_radius;
    constexpr int kAngles = 128;
    DiskNorm out;
    double edge = 0.0;
    for (int i = 0; i < kAngles; ++i) {
        const double th = 2.0 * kPi * i / kAngles;
        const double ct = std::cos(th);
        const double st = std::sin(th);
        auto f = [&](double r) { return density(Point{center.x + r * ct, center.y + r * st}) * r; };
        out.disk += quad::integrate(f, 0.0, Rd, tol * 1e-2, tol * 1e-2, 4000).value;
        edge += density(Point{center.x + Rd * ct, center.y + Rd * st});
    }
    out.disk *= 2.0 * kPi / kAngles;
    edge /= kAngles;
    // Beyond Rd: density ~ A K0(q r)^2, and int_R^inf r K0(qr)^2 dr = (R^2/2)(K1^2 - K0^2)(qR).
    const double k0 = special::bessel_k0_scaled(q * Rd);
    const double k1 = special::bessel_k1_scaled(q * Rd);
    out.tail = 2.0 * kPi * edge * 0.5 * Rd * Rd * (k1 * k1 - k0 * k0) / (k0 * k0);
    return out;
}

std::vector<CurveBoundState> find_bound_states_curve(const BaseProblem& problem, const CurveSupport& curve,
                                                     double alpha, Window window, double tol, bool disk_check) {
    if (alpha == 0.0 || !std::isfinite(alpha)) fail(ErrorCode::InvalidArgument, "coupling must be finite and nonzero");
    const FreePlane& plane = free_plane(problem);
    const double top = problem.continuum_infimum();
    const double hi = std::min(window.emax, top - 1e-12);
    const double lo = window.emin;
    if (!(lo < hi)) fail(ErrorCode::InvalidArgument, "empty window");
    if (!(alpha > 0.0)) fail(ErrorCode::NoRootInWindow, "a repulsive curve binds no state on the free plane");

    auto solve = [&](const CurveSupport& c) {
        auto f = [&](double E) { return 1.0 / alpha - curve_diagonal_at_order(problem, c, E); };
        auto df = [&](double E) { return -curve_diagonal_derivative_at_order(problem, c, E); };
        if (!(f(lo) > 0.0) || !(f(hi) < 0.0))
            fail(ErrorCode::NoRootInWindow, "1/alpha - G0(Gamma,Gamma|E) has no sign change in the window");
        return refine_root(f, df, lo, hi, std::max(tol, 1e-14));
    };
    const int cap = curve.kind() == CurveKind::Polyline ? kMaxPolylineOrder : kMaxClosedOrder;
    CurveSupport cur = curve;
    SecularRoot prev = solve(cur);
    SecularRoot root = prev;
    double shift = std::numeric_limits<double>::infinity();
    while (2 * cur.order() <= cap) {
        cur = cur.with_order(2 * cur.order());
        root = solve(cur);
        shift = std::abs(root.energy - prev.energy);
        if (shift <= std::max(tol, 1e-12) * std::max(1.0, std::abs(root.energy))) break;
        prev = root;
    }
    if (!std::isfinite(shift)) fail(ErrorCode::QuadratureFailure, "curve order cap reached before refinement");

    CurveBoundState out;
    out.order = cur.order();
    out.root_shift = shift;
    const double Estar = root.energy;
    const double deriv = curve_diagonal_derivative_at_order(problem, cur, Estar);
    BoundState& s = out.state;
    s.energy = Estar;
    s.lo = root.lo;
    s.hi = root.hi;
    s.kind = StateKind::Shifted;
    s.normalization = deriv;
    s.residual = root.residual;
    s.slope = -deriv;
    const double N = 1.0 / std::sqrt(deriv);
    auto self = problem.shared_from_this();
    s.wavefunction = [self, cur, Estar, N, tol](Point x) {
        return Complex(N * curve_kernel(*self, cur, x, Estar, tol).value, 0.0);
    };
    if (disk_check) {
        const double q = std::sqrt(-Estar / plane.kinetic());
        const auto psi = s.wavefunction;
        const DiskNorm dn = disk_norm([&](Point x) { return std::norm(psi(x)); }, cur.center(),
                                      cur.extent() + 6.0 / q, Estar, plane.kinetic(), 1e-9);
        out.disk_norm = dn.total();
        out.disk_tail = dn.tail;
    }
    return {out};
}

}  // namespace krein
