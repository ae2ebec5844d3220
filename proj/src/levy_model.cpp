#include "levychain/levy_model.hpp"

#include "levychain/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace levychain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSnap = 1e-9;

bool snaps_to(double x, double e) {
    if (!std::isfinite(e)) return false;
    if (x == e) return true;
    return std::abs(x - e) <= kSnap * std::max(std::abs(x), std::abs(e));
}

// Checks a quadrature result. Divergent integrals propagate as +inf.
double accept(const QuadResult& r, const char* what) {
    if (!std::isfinite(r.value)) return kInf;
    if (!r.converged && r.error > 1e-8 * std::max(std::abs(r.value), 1e-300)) {
        std::ostringstream msg;
        msg << what << ": quadrature did not converge (error estimate " << r.error << ")";
        throw NumericalError(msg.str(), r.error);
    }
    return r.value;
}

double norm_pow(std::span<const double> x, int power) {
    if (power == 0) return 1.0;
    double s = 0.0;
    for (double v : x) s += v * v;
    return power == 2 ? s : std::sqrt(s);
}

Box full_box(int dim) { return Box(static_cast<size_t>(dim), Interval::whole_line()); }

Box cube(int dim, double r) { return Box(static_cast<size_t>(dim), Interval::closed(-r, r)); }

// Complement of [-r, r]^d as disjoint slabs.
std::vector<Box> outside_boxes(int dim, double r) {
    std::vector<Box> out;
    for (int j = 0; j < dim; ++j) {
        for (int side : {-1, 1}) {
            Box b(static_cast<size_t>(dim));
            for (int i = 0; i < dim; ++i) {
                if (i < j) b[i] = Interval::closed(-r, r);
                else if (i > j) b[i] = Interval::whole_line();
                else b[i] = side < 0 ? Interval{-kInf, -r, false, false} : Interval{r, kInf, false, false};
            }
            out.push_back(std::move(b));
        }
    }
    return out;
}

double cos_minus_one(double x) {
    double s = std::sin(0.5 * x);
    return -2.0 * s * s;
}

// sin(x) - x without cancellation for small x.
double sin_minus_id(double x) {
    if (std::abs(x) > 0.1) return std::sin(x) - x;
    double term = -x * x * x / 6.0, sum = 0.0;
    for (int n = 4; n < 20 && term != 0.0; n += 2) {
        sum += term;
        term *= -x * x / (n * (n + 1));
    }
    return sum;
}

}  // namespace

Interval Interval::whole_line() { return {-kInf, kInf, false, false}; }

bool Interval::contains(double x) const {
    if (snaps_to(x, lo)) return lo_closed;
    if (snaps_to(x, hi)) return hi_closed;
    return lo < x && x < hi;
}

bool Interval::empty() const {
    if (lo > hi) return true;
    return lo == hi && !(lo_closed && hi_closed);
}

Interval Interval::intersect(const Interval& o) const {
    Interval r;
    if (lo > o.lo) {
        r.lo = lo;
        r.lo_closed = lo_closed;
    } else if (o.lo > lo) {
        r.lo = o.lo;
        r.lo_closed = o.lo_closed;
    } else {
        r.lo = lo;
        r.lo_closed = lo_closed && o.lo_closed;
    }
    if (hi < o.hi) {
        r.hi = hi;
        r.hi_closed = hi_closed;
    } else if (o.hi < hi) {
        r.hi = o.hi;
        r.hi_closed = o.hi_closed;
    } else {
        r.hi = hi;
        r.hi_closed = hi_closed && o.hi_closed;
    }
    return r;
}

std::vector<Box> annulus_boxes(int dim, double delta) {
    std::vector<Box> out;
    if (delta >= 1.0) return out;
    delta = std::max(delta, 0.0);
    for (int j = 0; j < dim; ++j) {
        for (int side : {-1, 1}) {
            Box b(static_cast<size_t>(dim));
            for (int i = 0; i < dim; ++i) {
                if (i < j) b[i] = Interval::closed(-delta, delta);
                else if (i > j) b[i] = Interval::closed(-1.0, 1.0);
                else b[i] = side < 0 ? Interval{-1.0, -delta, true, false} : Interval{delta, 1.0, false, true};
            }
            out.push_back(std::move(b));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// LevyMeasure

LevyMeasure LevyMeasure::zero(int dim) {
    LevyMeasure m;
    m.dim_ = dim;
    return m;
}

LevyMeasure LevyMeasure::atomic(int dim, std::vector<Atom> atoms, ClosedForms flags) {
    LevyMeasure m;
    m.dim_ = dim;
    m.atoms_ = std::move(atoms);
    m.closed_ = std::move(flags);
    return m;
}

LevyMeasure LevyMeasure::with_density(int dim, DensityFn density, ClosedForms closed,
                                      double support_radius) {
    if (dim > 1 && !(support_radius > 0.0))
        throw ModelError("a density in dimension > 1 needs a positive support_radius");
    LevyMeasure m;
    m.dim_ = dim;
    m.density_ = std::move(density);
    m.closed_ = std::move(closed);
    m.support_radius_ = support_radius;
    return m;
}

LevyMeasure LevyMeasure::plus_atoms(std::vector<Atom> atoms) const {
    LevyMeasure m = *this;
    m.atoms_.insert(m.atoms_.end(), atoms.begin(), atoms.end());
    // The closed forms describe the density part only; flags no longer apply.
    m.closed_.infinite_mass.reset();
    m.closed_.infinite_variation.reset();
    return m;
}

LevyMeasure LevyMeasure::density_part() const {
    LevyMeasure m = *this;
    m.atoms_.clear();
    if (!m.density_) m.closed_ = {};
    return m;
}

bool LevyMeasure::in_box(std::span<const double> x, const Box& box) const {
    for (size_t j = 0; j < box.size(); ++j)
        if (!box[j].contains(x[j])) return false;
    return true;
}

double LevyMeasure::density_half_line(int side, double a, double b, int power) const {
    if (!(b > a)) return 0.0;
    if (closed_.half_line_moment) return closed_.half_line_moment(side, a, b, power);
    auto f = [&](double u) {
        double x = side * u;
        double k = density_(std::span<const double>(&x, 1));
        return power == 0 ? k : (power == 1 ? u * k : u * u * k);
    };
    return accept(integrate_half_line(f, a, b, rel_tol_), "Levy measure moment");
}

double LevyMeasure::density_box(const Box& box,
                                const std::function<double(std::span<const double>)>& g) const {
    if (dim_ == 1) {
        const Interval& I = box[0];
        double total = 0.0;
        auto piece = [&](int side, double a, double b) {
            if (!(b > a)) return;
            auto f = [&](double u) {
                double x = side * u;
                std::span<const double> s(&x, 1);
                return g(s) * density_(s);
            };
            total += accept(integrate_half_line(f, a, b, rel_tol_), "Levy measure integral");
        };
        if (I.hi > 0.0) piece(+1, std::max(I.lo, 0.0), I.hi);
        if (I.lo < 0.0) piece(-1, std::max(-I.hi, 0.0), -I.lo);
        return total;
    }
    // Tensor Gauss-Kronrod over the box clipped to the support radius, with a
    // breakpoint at 0 in every coordinate.
    std::array<double, kMaxDim> x{};
    const double R = support_radius_;
    std::function<double(int)> rec = [&](int j) -> double {
        double lo = std::max(box[j].lo, -R), hi = std::min(box[j].hi, R);
        if (!(hi > lo)) return 0.0;
        auto f = [&](double v) {
            x[j] = v;
            if (j + 1 == dim_) {
                std::span<const double> s(x.data(), static_cast<size_t>(dim_));
                return g(s) * density_(s);
            }
            return rec(j + 1);
        };
        double tol = j + 1 == dim_ ? 1e-10 : 1e-8;
        if (lo < 0.0 && hi > 0.0)
            return integrate_interval(f, lo, 0.0, tol).value + integrate_interval(f, 0.0, hi, tol).value;
        return integrate_interval(f, lo, hi, tol).value;
    };
    return rec(0);
}

double LevyMeasure::integrate(const Box& box,
                              const std::function<double(std::span<const double>)>& g) const {
    double total = 0.0;
    for (const Atom& a : atoms_)
        if (in_box(a.x, box)) total += a.weight * g(a.x);
    for (const Interval& I : box)
        if (I.empty()) return total;
    if (density_) total += density_box(box, g);
    return total;
}

double LevyMeasure::abs_moment(const Box& box, int power) const {
    double total = 0.0;
    for (const Atom& a : atoms_)
        if (in_box(a.x, box)) total += a.weight * norm_pow(a.x, power);
    if (!density_) return total;
    for (const Interval& I : box)
        if (I.empty()) return total;
    if (dim_ == 1) {
        const Interval& I = box[0];
        if (I.hi > 0.0) total += density_half_line(+1, std::max(I.lo, 0.0), I.hi, power);
        if (I.lo < 0.0) total += density_half_line(-1, std::max(-I.hi, 0.0), -I.lo, power);
        return total;
    }
    return total + density_box(box, [power](std::span<const double> x) { return norm_pow(x, power); });
}

double LevyMeasure::mass(const Box& box) const { return abs_moment(box, 0); }

double LevyMeasure::coordinate_square(const Box& box, int j) const {
    if (dim_ == 1) return abs_moment(box, 2);
    return integrate(box, [j](std::span<const double> x) { return x[j] * x[j]; });
}

double LevyMeasure::cross_abs(const Box& box, int i, int j) const {
    if (dim_ == 1) return 0.0;
    return integrate(box, [i, j](std::span<const double> x) { return std::abs(x[i] * x[j]); });
}

Complex LevyMeasure::density_jump_exponent(double p, int cutoff_V) const {
    if (!density_ || p == 0.0) return 0.0;
    if (dim_ != 1) throw std::logic_error("density_jump_exponent is one-dimensional");
    if (closed_.jump_exponent) return closed_.jump_exponent(p, cutoff_V);

    const double ap = std::abs(p);
    const double x0 = std::min(1.0, 1.0 / ap);
    const double V = cutoff_V;
    double re = 0.0, im = 0.0;
    for (int side : {1, -1}) {
        auto k = [&](double u) {
            double x = side * u;
            return density_(std::span<const double>(&x, 1));
        };
        auto fre = [&](double u) { return cos_minus_one(ap * u) * k(u); };
        auto fim = [&](double u) { return (u <= V ? sin_minus_id(ap * u) : std::sin(ap * u)) * k(u); };
        double sre = accept(integrate_from_zero(fre, x0, rel_tol_), "jump exponent");
        double sim = accept(integrate_from_zero(fim, x0, rel_tol_), "jump exponent");

        // Half-period panels out to X, with a breakpoint at the cut-off.
        const double w = std::numbers::pi / ap;
        double a = x0;
        double X = std::max(4.0, 2.0 * x0);
        for (int grow = 0;; ++grow) {
            while (a < X) {
                double b = std::min(a + w, X);
                if (a < V && b > V) b = V;
                sre += integrate_interval(fre, a, b, 1e-12).value;
                sim += integrate_interval(fim, a, b, 1e-12).value;
                a = b;
            }
            double kX = k(X);
            double dk = (k(X * (1.0 + 1e-4)) - kX) / (1e-4 * X);
            double scale = std::max(1.0, std::abs(sre) + std::abs(sim));
            if (std::abs(dk) / (ap * ap) <= 1e-11 * scale && kX / ap <= 1e-6 * scale) {
                // Leading integration-by-parts term of the oscillatory tail.
                sre += -std::sin(ap * X) * kX / ap - density_half_line(side, X, kInf, 0);
                sim += std::cos(ap * X) * kX / ap;
                break;
            }
            if (grow > 40 || X * ap > 1e8)
                throw NumericalError("jump exponent: oscillatory tail did not decay", std::abs(dk) / (ap * ap));
            X *= 2.0;
        }
        re += sre;
        im += side * sim;
    }
    return {re, p > 0 ? im : -im};
}

// ---------------------------------------------------------------------------
// Model validation

void validate_model(const LevyModel& m) {
    auto fail = [&](const std::string& why) {
        throw ModelError("invalid model" + (m.name.empty() ? std::string() : " '" + m.name + "'") + ": " + why);
    };
    if (m.dim < 1 || m.dim > kMaxDim) fail("dim must be in 1..3");
    if (static_cast<int>(m.sigma2.size()) != m.dim) fail("sigma2 must have dim entries");
    if (static_cast<int>(m.mu.size()) != m.dim) fail("mu must have dim entries");
    if (m.measure.dim() != m.dim) fail("measure dimension differs from model dimension");
    for (size_t j = 0; j < m.sigma2.size(); ++j) {
        if (!(m.sigma2[j] >= 0.0) || !std::isfinite(m.sigma2[j])) fail("sigma2 entries must be finite and >= 0");
        if (j > 0 && m.sigma2[j] > m.sigma2[j - 1]) fail("sigma2 must be sorted nonincreasing");
    }
    for (double v : m.mu)
        if (!std::isfinite(v)) fail("mu must be finite");
    if (m.cutoff_V != 0 && m.cutoff_V != 1) fail("cutoff_V must be 0 or 1");
    for (const Atom& a : m.measure.atoms()) {
        if (static_cast<int>(a.x.size()) != m.dim) fail("atom location has wrong dimension");
        if (!(a.weight > 0.0) || !std::isfinite(a.weight)) fail("atom weights must be positive and finite");
        bool origin = std::all_of(a.x.begin(), a.x.end(), [](double v) { return v == 0.0; });
        if (origin) fail("atom at the origin");
        for (double v : a.x)
            if (!std::isfinite(v)) fail("atom location must be finite");
    }

    const LevyMeasure& lam = m.measure;
    double second = lam.abs_moment(cube(m.dim, 1.0), 2);
    if (!(second < 1e12)) fail("integral of |x|^2 over [-1,1]^d is not finite");
    double tail = 0.0;
    for (const Box& b : outside_boxes(m.dim, 1.0)) tail += lam.mass(b);
    if (!(tail < 1e12)) fail("mass outside [-1,1]^d is not finite");

    if (m.cutoff_V == 0) {
        bool infinite = lam.closed_forms().infinite_variation.value_or(false);
        if (!infinite) infinite = !(lam.abs_moment(cube(m.dim, 1.0), 1) < 1e12);
        if (infinite) fail("cutoff_V = 0 requires a finite first absolute moment near 0 (kappa(0) < inf)");
    }

    if (m.orey_epsilon) {
        double eps = *m.orey_epsilon;
        if (!(eps > 0.0 && eps < 2.0)) fail("orey_epsilon must lie in (0, 2)");
        auto q = orey_quotients(m, eps, 1, 20);
        double qmin = *std::min_element(q.begin(), q.end());
        if (!(qmin > 0.0)) fail("Orey quotient vanishes on the dyadic grid for the asserted epsilon");
        // Regression of log q on log r: a clearly positive slope means q -> 0.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(q.size());
        for (size_t i = 0; i < q.size(); ++i) {
            double xr = -static_cast<double>(i + 1) * std::log(2.0), yr = std::log(q[i]);
            sx += xr;
            sy += yr;
            sxx += xr * xr;
            sxy += xr * yr;
        }
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        if (slope > 0.05) fail("Orey quotient decays on the dyadic grid; asserted epsilon looks too small");
    }
}

// ---------------------------------------------------------------------------
// Small-jump functionals

SmallJumpFunctionals::SmallJumpFunctionals(const LevyModel& model) : model_(model) {
    const LevyMeasure& lam = model.measure;
    const ClosedForms& cf = lam.closed_forms();
    if (cf.infinite_mass.value_or(false)) {
        total_mass_ = kInf;
    } else {
        double inner = lam.mass(cube(model.dim, 1.0));
        total_mass_ = inner;
    }
    dtail_ = 0.0;
    for (const Box& b : outside_boxes(model.dim, 1.0)) dtail_ += lam.mass(b);
    if (std::isfinite(total_mass_)) total_mass_ += dtail_;
    kappa0_ = cf.infinite_variation.value_or(false) ? kInf : lam.abs_moment(cube(model.dim, 1.0), 1);
    sigma2_min_ = *std::min_element(model.sigma2.begin(), model.sigma2.end());
    sigma2_sum_ = 0.0;
    for (double s : model.sigma2) sigma2_sum_ += s;
}

double SmallJumpFunctionals::kappa(double delta) const {
    if (delta >= 1.0) return 0.0;
    if (delta <= 0.0) return kappa0_;
    {
        std::lock_guard lock(cache_mutex_);
        auto it = kappa_cache_.find(delta);
        if (it != kappa_cache_.end()) return it->second;
    }
    double v = 0.0;
    for (const Box& b : annulus_boxes(model_.dim, delta)) v += model_.measure.abs_moment(b, 1);
    std::lock_guard lock(cache_mutex_);
    kappa_cache_.emplace(delta, v);
    return v;
}

double SmallJumpFunctionals::gamma(double delta) const {
    if (delta >= 1.0) return 0.0;
    double v = 0.0;
    for (const Box& b : annulus_boxes(model_.dim, delta)) v += model_.measure.mass(b);
    return delta * delta * v;
}

double SmallJumpFunctionals::chi(double delta) const {
    const int d = model_.dim;
    if (d == 1 || delta <= 0.0) return 0.0;
    Box b = cube(d, delta);
    double v = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) v += model_.measure.cross_abs(b, i, j);
    return v;
}

// ---------------------------------------------------------------------------
// Characteristic exponent

Complex psi(const LevyModel& model, std::span<const double> p) {
    const int d = model.dim;
    Complex out = 0.0;
    double dot_mu = 0.0;
    bool zero = true;
    for (int j = 0; j < d; ++j) {
        out += -0.5 * model.sigma2[j] * p[j] * p[j];
        dot_mu += model.mu[j] * p[j];
        zero = zero && p[j] == 0.0;
    }
    if (zero) return 0.0;
    out += Complex(0.0, dot_mu);

    const LevyMeasure& lam = model.measure;
    const Box cut = cube(d, model.cutoff_V);
    for (const Atom& a : lam.atoms()) {
        double px = 0.0;
        for (int j = 0; j < d; ++j) px += p[j] * a.x[j];
        double comp = (model.cutoff_V > 0 && lam.in_box(a.x, cut)) ? px : 0.0;
        out += a.weight * Complex(std::cos(px) - 1.0, std::sin(px) - comp);
    }
    if (!lam.has_density()) return out;
    if (d == 1) return out + lam.density_jump_exponent(p[0], model.cutoff_V);

    std::vector<double> pv(p.begin(), p.end());
    const double V = model.cutoff_V;
    auto pdot = [pv](std::span<const double> x) {
        double s = 0.0;
        for (size_t j = 0; j < x.size(); ++j) s += pv[j] * x[j];
        return s;
    };
    auto inside = [V](std::span<const double> x) {
        return std::all_of(x.begin(), x.end(), [V](double v) { return std::abs(v) <= V; });
    };
    const Box all = full_box(d);
    double re = lam.integrate(all, [&](std::span<const double> x) { return std::cos(pdot(x)) - 1.0; });
    double im = lam.integrate(all, [&](std::span<const double> x) {
        double px = pdot(x);
        return std::sin(px) - (V > 0 && inside(x) ? px : 0.0);
    });
    // Atoms were already counted above; integrate() includes them again.
    for (const Atom& a : lam.atoms()) {
        double px = pdot(a.x);
        re -= a.weight * (std::cos(px) - 1.0);
        im -= a.weight * (std::sin(px) - (V > 0 && inside(a.x) ? px : 0.0));
    }
    return out + Complex(re, im);
}

Complex psi(const LevyModel& model, double p) { return psi(model, std::span<const double>(&p, 1)); }

namespace {

// e^z - 1 - z without cancellation for small z.
double expm1_minus_id(double z) {
    if (std::abs(z) > 0.1) return std::expm1(z) - z;
    double term = 0.5 * z * z, sum = 0.0;
    for (int n = 3; n < 14 && term != 0.0; ++n) {
        sum += term;
        term *= z / n;
    }
    return sum;
}

}  // namespace

double log_mgf(const LevyModel& model, double u) {
    if (model.dim != 1) throw std::logic_error("log_mgf is one-dimensional");
    double out = 0.5 * model.sigma2[0] * u * u + model.mu[0] * u;
    const LevyMeasure& lam = model.measure;
    const double V = model.cutoff_V;
    for (const Atom& a : lam.atoms()) {
        double x = a.x[0];
        double comp = (V > 0 && std::abs(x) <= V) ? u * x : 0.0;
        out += a.weight * (std::expm1(u * x) - comp);
    }
    if (!lam.has_density() || u == 0.0) return out;
    for (int side : {1, -1}) {
        auto k = [&](double y) {
            double x = side * y;
            return lam.density(std::span<const double>(&x, 1));
        };
        auto near = [&](double y) {
            double x = side * y;
            double e = V > 0 ? expm1_minus_id(u * x) : std::expm1(u * x);
            return e * k(y);
        };
        auto far = [&](double y) { return std::expm1(u * side * y) * k(y); };
        out += accept(integrate_half_line(near, 0.0, 1.0, 1e-12), "log_mgf");
        double tail = accept(integrate_half_line(far, 1.0, kInf, 1e-12), "log_mgf");
        if (!std::isfinite(tail)) return kInf;
        out += tail;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Coercivity

std::vector<double> orey_quotients(const LevyModel& model, double epsilon, int kmin, int kmax) {
    std::vector<double> q;
    for (int k = kmin; k <= kmax; ++k) {
        double r = std::ldexp(1.0, -k);
        double second = model.measure.abs_moment(cube(model.dim, r), 2);
        q.push_back(second / std::pow(r, 2.0 - epsilon));
    }
    return q;
}

Coercivity coercivity_constants(const LevyModel& model) {
    const double s2min = *std::min_element(model.sigma2.begin(), model.sigma2.end());
    constexpr double pi = std::numbers::pi;
    if (s2min > 0.0) {
        Coercivity c;
        c.P = 0.0;
        c.epsilon = 2.0;
        c.C = 0.5 * (2.0 / pi) * (2.0 / pi) * s2min;
        c.P_exact = 0.0;
        c.C_exact = 0.5 * s2min;
        return c;
    }
    if (model.dim == 1 && model.orey_epsilon) {
        const double eps = *model.orey_epsilon;
        auto q = orey_quotients(model, eps, 0, 20);
        double qmin = *std::min_element(q.begin(), q.end());
        if (!(qmin > 0.0)) throw NoDensityGuarantee("no density guarantee: Orey quotient vanishes on the grid");
        // Between grid points r in [2^-(k+1), 2^-k] the quotient can drop by at
        // most the factor 2^-(2-eps).
        const double A0 = qmin * std::pow(2.0, -(2.0 - eps));
        const double r0 = 1.0;
        Coercivity c;
        c.epsilon = eps;
        c.P = pi / (2.0 * r0);
        c.C = 8.0 / (9.0 * pi * pi) * A0 * std::pow(pi / 2.0, 2.0 - eps);
        // 1 - cos(y) >= 2 y^2 / pi^2 on |y| <= pi, applied to jumps |x| <= pi/|p|.
        c.P_exact = pi / r0;
        c.C_exact = 2.0 / (pi * pi) * A0 * std::pow(pi, 2.0 - eps);
        return c;
    }
    throw NoDensityGuarantee(
        "no density guarantee: no diffusion component and no asserted Orey small-jump condition");
}

}  // namespace levychain
