#include "levychain/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace levychain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sums geometric panels produced by `panel(j)` and extrapolates the tail once
// successive ratios settle. Shared by the two singular/semi-infinite rules.
template <class PanelFn>
QuadResult sum_geometric_panels(PanelFn panel, int max_panels, double rel_tol) {
    QuadResult out;
    double prev = 0.0, prev_ratio = std::numeric_limits<double>::quiet_NaN();
    int stuck_at_one = 0, zero_run = 0;
    for (int j = 0; j < max_panels; ++j) {
        auto [c, err] = panel(j);
        out.value += c;
        out.error += err;
        if (!std::isfinite(c)) {
            out.value = kInf;
            out.converged = false;
            return out;
        }
        if (c == 0.0) {
            if (++zero_run >= 4 && j >= 8) return out;
            prev = 0.0;
            continue;
        }
        zero_run = 0;
        if (j >= 1 && prev != 0.0) {
            double r = c / prev;
            if (r >= 0.999) {
                if (++stuck_at_one >= 12) {
                    out.value = kInf;
                    out.converged = false;
                    return out;
                }
            } else {
                stuck_at_one = 0;
            }
            if (r >= 0.0 && r < 0.999 && std::isfinite(prev_ratio) && j >= 3) {
                double tail = c * r / (1.0 - r);
                double tail_err = std::abs(tail) * std::abs(r - prev_ratio) / (1.0 - r) +
                                  1e-15 * std::abs(tail);
                double scale = std::abs(out.value + tail);
                if (tail_err <= rel_tol * scale || std::abs(c) <= 1e-3 * rel_tol * scale) {
                    out.value += tail;
                    out.error += tail_err;
                    return out;
                }
            } else if (r < 0.0 && std::abs(c) <= 1e-3 * rel_tol * std::abs(out.value) && j >= 6) {
                out.error += std::abs(c);
                return out;
            }
            prev_ratio = r;
        }
        prev = c;
    }
    // Ran out of panels: accept only if the last panel was negligible.
    if (std::abs(prev) > rel_tol * std::abs(out.value)) out.converged = false;
    out.error += std::abs(prev);
    return out;
}

}  // namespace

QuadResult integrate_interval(const RealFn& f, double a, double b, double rel_tol) {
    QuadResult out;
    if (!(b > a)) return out;
    double err = 0.0, l1 = 0.0;
    // Boost's error estimate misbehaves on tiny intervals far from the
    // origin, so every panel is mapped onto [-1, 1].
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    auto g = [&](double t) { return f(mid + half * t) * half; };
    out.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, -1.0, 1.0, 12, std::max(rel_tol, 1e-14),
                                                                             &err, &l1);
    out.error = err;
    out.converged = std::isfinite(out.value) && err <= std::max(rel_tol * l1, 1e-300) * 10.0;
    return out;
}

QuadResult integrate_from_zero(const RealFn& f, double b, double rel_tol) {
    if (!(b > 0.0)) return {};
    auto panel = [&](int j) {
        double hi = std::ldexp(b, -j);
        auto r = integrate_interval(f, 0.5 * hi, hi, rel_tol * 1e-2);
        return std::pair{r.value, r.error};
    };
    return sum_geometric_panels(panel, 1000, rel_tol);
}

QuadResult integrate_to_infinity(const RealFn& f, double a, double rel_tol) {
    if (!(a > 0.0)) throw std::invalid_argument("integrate_to_infinity: lower limit must be > 0");
    auto panel = [&](int j) {
        double lo = std::ldexp(a, j);
        auto r = integrate_interval(f, lo, 2.0 * lo, rel_tol * 1e-2);
        return std::pair{r.value, r.error};
    };
    return sum_geometric_panels(panel, 1000, rel_tol);
}

QuadResult integrate_half_line(const RealFn& f, double a, double b, double rel_tol) {
    if (a < 0.0 || !(b > a)) throw std::invalid_argument("integrate_half_line: need 0 <= a < b");
    QuadResult out;
    auto add = [&](const QuadResult& r) {
        out.value += r.value;
        out.error += r.error;
        out.converged = out.converged && r.converged;
    };
    const double split = std::isfinite(b) ? std::min(1.0, b) : 1.0;
    if (a == 0.0) {
        add(integrate_from_zero(f, split, rel_tol));
    } else if (a < split) {
        // Graded panels toward a, so integrands steep near a small a stay resolved.
        double hi = split;
        while (hi > a) {
            double lo_panel = std::max(a, 0.5 * hi);
            if (lo_panel < 4.0 * a) lo_panel = a;
            add(integrate_interval(f, lo_panel, hi, rel_tol));
            hi = lo_panel;
        }
    }
    double lo = std::max(a, split);
    if (std::isfinite(b)) {
        if (b > lo) add(integrate_interval(f, lo, b, rel_tol));
    } else {
        add(integrate_to_infinity(f, lo, rel_tol));
    }
    return out;
}

}  // namespace levychain
