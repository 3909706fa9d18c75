#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace krein {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

// A point in one or two dimensions. One-dimensional problems read only x.
struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point p, Point q) { return std::hypot(p.x - q.x, p.y - q.y); }

// hbar and mass; the kinetic constant c = hbar^2 / 2m multiplies -Laplacian.
struct Units {
    double hbar = 1.0;
    double mass = 0.5;
    double kinetic() const { return hbar * hbar / (2.0 * mass); }
};

// Side of the continuum cut for boundary values G(E +- i0).
enum class Side { Plus, Minus };

enum class ErrorCode {
    InvalidArgument,
    OutOfRange,
    PoleProximity,
    CutViolation,
    Unsupported,
    ZeroOfPhi,
    WindowTooNarrow,
    NotARoot,
    NodeLevel,
    NonRenormalizedProblem,
    DimensionMismatch,
    IllConditioned,
    QuadratureFailure,
    NoRootInWindow,
    Divergent,
};

std::string_view to_string(ErrorCode code);

class SolverError : public std::runtime_error {
public:
    SolverError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw SolverError(code, what); }

}  // namespace krein
