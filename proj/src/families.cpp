#include "levychain/families.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace levychain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Integral of u^e over (a, b), 0 <= a < b <= inf; +inf when divergent.
double power_integral(double e, double a, double b) {
    if (e == -1.0) return std::log(b / a);
    double p = e + 1.0;
    if (p > 0.0) return (std::pow(b, p) - std::pow(a, p)) / p;
    return (std::pow(a, p) - std::pow(b, p)) / (-p);
}

void check_alpha(double alpha, const char* who) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw ModelError(std::string(who) + ": alpha must lie in (0, 2)");
}

}  // namespace

double upper_gamma(double s, double x) {
    if (x == kInf) return 0.0;
    if (s > 0.0) return x == 0.0 ? std::tgamma(s) : boost::math::tgamma(s, x);
    if (x == 0.0) return kInf;
    if (s == 0.0) return boost::math::expint(1, x);
    return (upper_gamma(s + 1.0, x) - std::pow(x, s) * std::exp(-x)) / s;
}

LevyMeasure stable_measure(double alpha, double c) {
    check_alpha(alpha, "stable_measure");
    if (!(c > 0.0)) throw ModelError("stable_measure: c must be positive");
    ClosedForms cf;
    cf.half_line_moment = [alpha, c](int, double a, double b, int power) {
        return c * power_integral(power - 1.0 - alpha, a, b);
    };
    cf.jump_exponent = [alpha, c](double p, int) -> Complex {
        // Symmetric measure: the compensator is odd and drops out for either cut-off.
        double ap = std::abs(p);
        if (alpha == 1.0) return -c * std::numbers::pi * ap;
        return -2.0 * c * std::pow(ap, alpha) * std::tgamma(1.0 - alpha) *
               std::cos(std::numbers::pi * alpha / 2.0) / alpha;
    };
    cf.infinite_mass = true;
    cf.infinite_variation = alpha >= 1.0;
    auto density = [alpha, c](std::span<const double> x) {
        double ax = std::abs(x[0]);
        return ax == 0.0 ? 0.0 : c * std::pow(ax, -1.0 - alpha);
    };
    return LevyMeasure::with_density(1, density, cf);
}

LevyModel stable_model(double alpha, double c) {
    LevyModel m;
    m.name = "alpha_stable";
    m.dim = 1;
    m.sigma2 = {0.0};
    m.mu = {0.0};
    m.measure = stable_measure(alpha, c);
    m.cutoff_V = 1;
    m.orey_epsilon = alpha;
    return m;
}

LevyMeasure vg_measure(double s) {
    if (!(s > 0.0)) throw ModelError("vg_measure: scale must be positive");
    ClosedForms cf;
    cf.half_line_moment = [s](int, double a, double b, int power) {
        auto E = [s](double x) { return x == kInf ? 0.0 : std::exp(-x / s); };
        switch (power) {
            case 0: {
                double ea = a == 0.0 ? kInf : boost::math::expint(1, a / s);
                double eb = b == kInf ? 0.0 : boost::math::expint(1, b / s);
                return ea - eb;
            }
            case 1:
                return s * (E(a) - E(b));
            default: {
                double fb = b == kInf ? 0.0 : (1.0 + b / s) * E(b);
                return s * s * ((1.0 + a / s) * E(a) - fb);
            }
        }
    };
    cf.jump_exponent = [s](double p, int) -> Complex { return -std::log1p(s * s * p * p); };
    cf.infinite_mass = true;
    cf.infinite_variation = false;
    auto density = [s](std::span<const double> x) {
        double ax = std::abs(x[0]);
        return ax == 0.0 ? 0.0 : std::exp(-ax / s) / ax;
    };
    return LevyMeasure::with_density(1, density, cf);
}

double vg_density(double t, double x, double s) {
    const double nu = t - 0.5;
    const double u = std::abs(x) / s;
    const double norm = std::sqrt(std::numbers::pi) * std::tgamma(t) * std::pow(2.0, nu);
    if (u == 0.0) {
        if (nu <= 0.0) return kInf;
        return std::tgamma(nu) * std::pow(2.0, nu - 1.0) / norm / s;
    }
    return std::pow(u, nu) * boost::math::cyl_bessel_k(nu, u) / norm / s;
}

LevyModel vg_model(double s) {
    LevyModel m;
    m.name = "vg";
    m.dim = 1;
    m.sigma2 = {0.0};
    m.mu = {0.0};
    m.measure = vg_measure(s);
    m.cutoff_V = 1;
    m.reference_density = [s](double t, std::span<const double> z) { return vg_density(t, z[0], s); };
    return m;
}

LevyMeasure cgmy_measure(const CgmyParams& p) {
    check_alpha(p.alpha, "cgmy_measure");
    if (p.alpha == 1.0) throw ModelError("cgmy_measure: alpha = 1 is not supported");
    if (!(p.c > 0.0 && p.lambda_plus > 0.0 && p.lambda_minus > 0.0))
        throw ModelError("cgmy_measure: c, lambda_plus and lambda_minus must be positive");
    const double Y = p.alpha, C = p.c, lp = p.lambda_plus, lm = p.lambda_minus;
    ClosedForms cf;
    auto moment = [Y, C, lp, lm](int side, double a, double b, int power) {
        const double lam = side > 0 ? lp : lm;
        const double s = power - Y;
        return C * std::pow(lam, -s) * (upper_gamma(s, lam * a) - upper_gamma(s, lam * b));
    };
    cf.half_line_moment = moment;
    cf.jump_exponent = [Y, C, lp, lm, moment](double q, int V) -> Complex {
        const Complex i(0.0, 1.0);
        Complex full = C * std::tgamma(-Y) *
                       (std::pow(Complex(lp, -q), Y) - std::pow(lp, Y) + i * q * Y * std::pow(lp, Y - 1.0) +
                        std::pow(Complex(lm, q), Y) - std::pow(lm, Y) - i * q * Y * std::pow(lm, Y - 1.0));
        // Add back the compensator outside [-V, V].
        double lo = V;
        double first = moment(+1, lo, kInf, 1) - moment(-1, lo, kInf, 1);
        return full + i * q * first;
    };
    cf.infinite_mass = true;
    cf.infinite_variation = Y >= 1.0;
    auto density = [Y, C, lp, lm](std::span<const double> x) {
        double v = x[0];
        if (v == 0.0) return 0.0;
        double a = std::abs(v);
        return C * std::exp(-(v > 0 ? lp : lm) * a) * std::pow(a, -1.0 - Y);
    };
    return LevyMeasure::with_density(1, density, cf);
}

LevyModel cgmy_model(const CgmyParams& p, double mu) {
    LevyModel m;
    m.name = "cgmy";
    m.dim = 1;
    m.sigma2 = {0.0};
    m.mu = {mu};
    m.measure = cgmy_measure(p);
    m.cutoff_V = 1;
    m.orey_epsilon = p.alpha;
    return m;
}

double cgmy_jump_log_mgf(const CgmyParams& p, double u, int cutoff_V) {
    if (!(u < p.lambda_plus && u > -p.lambda_minus)) return kInf;
    const double Y = p.alpha, lp = p.lambda_plus, lm = p.lambda_minus;
    double full = p.c * std::tgamma(-Y) *
                  (std::pow(lp - u, Y) - std::pow(lp, Y) + u * Y * std::pow(lp, Y - 1.0) + std::pow(lm + u, Y) -
                   std::pow(lm, Y) - u * Y * std::pow(lm, Y - 1.0));
    LevyMeasure lam = cgmy_measure(p);
    const auto& mom = lam.closed_forms().half_line_moment;
    double first = mom(+1, cutoff_V, kInf, 1) - mom(-1, cutoff_V, kInf, 1);
    return full + u * first;
}

}  // namespace levychain
