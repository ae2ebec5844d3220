#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace levychain {

/// Raised when a numerical procedure cannot reach its requested tolerance.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double achieved_tol)
        : std::runtime_error(what), achieved_tol_(achieved_tol) {}
    double achieved_tol() const noexcept { return achieved_tol_; }

private:
    double achieved_tol_;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

using RealFn = std::function<double(double)>;

// Adaptive Gauss-Kronrod (15-point) on a finite interval. Relative tolerance is
// taken against the L1 norm of the integrand.
QuadResult integrate_interval(const RealFn& f, double a, double b, double rel_tol = 1e-12);

// Integral over [0, b] of an integrand that may be singular (but integrable) at
// 0. Geometric panels [b 2^-(j+1), b 2^-j] are summed until the panel ratio
// settles, and the remaining geometric series is extrapolated. A ratio that
// does not fall below one is reported as divergence (value = +inf,
// converged = false).
QuadResult integrate_from_zero(const RealFn& f, double b, double rel_tol = 1e-12);

// Integral over [a, inf), a > 0, by geometric panels [a 2^j, a 2^(j+1)].
QuadResult integrate_to_infinity(const RealFn& f, double a, double rel_tol = 1e-12);

// Integral over [a, b] with 0 <= a < b <= inf, splitting at 1 and routing the
// pieces to the singular and semi-infinite rules as needed.
QuadResult integrate_half_line(const RealFn& f, double a, double b, double rel_tol = 1e-12);

}  // namespace levychain
