#pragma once

#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace levychain {

constexpr int kMaxDim = 3;

using Complex = std::complex<double>;

/// A model or configuration violates one of its invariants.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// No guarantee that the process admits a continuous transition density.
class NoDensityGuarantee : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A coordinate interval with explicit endpoint closure. Membership tests snap
/// points lying within a relative 1e-9 of an endpoint onto that endpoint, so
/// lattice boundaries such as (k + 1/2) 3^-n classify atoms consistently.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = true;
    bool hi_closed = true;

    static Interval closed(double a, double b) { return {a, b, true, true}; }
    static Interval open(double a, double b) { return {a, b, false, false}; }
    static Interval whole_line();

    bool contains(double x) const;
    bool empty() const;
    Interval intersect(const Interval& other) const;
};

using Box = std::vector<Interval>;

struct Atom {
    std::vector<double> x;
    double weight = 0.0;
};

using DensityFn = std::function<double(std::span<const double>)>;

/// Exact integrals of the density part in d = 1. For side = +1 (resp. -1) the
/// function returns the integral of |x|^power k(x) over side * (a, b), where
/// 0 <= a < b <= inf and power is 0, 1 or 2. Infinite results are allowed.
using HalfLineMoment = std::function<double(int side, double a, double b, int power)>;

/// Exact density-part jump exponent in d = 1:
/// integral of (e^{ipx} - 1 - ipx 1_{[-V,V]}(x)) k(x) dx.
using JumpExponent = std::function<Complex(double p, int cutoff_V)>;

struct ClosedForms {
    HalfLineMoment half_line_moment;
    JumpExponent jump_exponent;
    std::optional<bool> infinite_mass;       // lambda(R^d) = inf
    std::optional<bool> infinite_variation;  // kappa(0) = inf
};

/// Levy measure: an optional density part plus finitely many atoms.
class LevyMeasure {
public:
    LevyMeasure() = default;

    static LevyMeasure zero(int dim);
    static LevyMeasure atomic(int dim, std::vector<Atom> atoms, ClosedForms flags = {});
    /// `support_radius` truncates density quadrature for dim > 1 (ignored in d = 1).
    static LevyMeasure with_density(int dim, DensityFn density, ClosedForms closed = {},
                                    double support_radius = 0.0);

    LevyMeasure plus_atoms(std::vector<Atom> atoms) const;
    /// Same measure with the atoms removed.
    LevyMeasure density_part() const;

    int dim() const { return dim_; }
    bool has_density() const { return static_cast<bool>(density_); }
    bool is_zero() const { return !density_ && atoms_.empty(); }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const ClosedForms& closed_forms() const { return closed_; }
    double density(std::span<const double> x) const { return density_ ? density_(x) : 0.0; }
    double support_radius() const { return support_radius_; }
    double rel_tol() const { return rel_tol_; }

    bool in_box(std::span<const double> x, const Box& box) const;

    /// Integral of g over the box (atoms respect the interval closures).
    double integrate(const Box& box, const std::function<double(std::span<const double>)>& g) const;
    double mass(const Box& box) const;
    /// Integral of |x|^power (Euclidean norm) over the box; power in {0, 1, 2}.
    double abs_moment(const Box& box, int power) const;
    double coordinate_square(const Box& box, int j) const;
    double cross_abs(const Box& box, int i, int j) const;

    /// d = 1 only: the density part's jump exponent, by closed form when
    /// available, otherwise by oscillatory quadrature (throws NumericalError).
    Complex density_jump_exponent(double p, int cutoff_V) const;

private:
    double density_half_line(int side, double a, double b, int power) const;
    double density_box(const Box& box, const std::function<double(std::span<const double>)>& g) const;

    int dim_ = 1;
    DensityFn density_;
    std::vector<Atom> atoms_;
    ClosedForms closed_;
    double support_radius_ = 0.0;
    double rel_tol_ = 1e-12;
};

/// Characteristic triplet (Sigma = diag(sigma2), lambda, mu) relative to the
/// cut-off 1_{[-V,V]^d}.
struct LevyModel {
    std::string name;
    int dim = 1;
    std::vector<double> sigma2;
    std::vector<double> mu;
    LevyMeasure measure;
    int cutoff_V = 1;
    std::optional<double> orey_epsilon;
    /// Optional closed-form transition density p_t(0, z), used by exact_density
    /// when no coercivity bound is available (e.g. variance gamma).
    std::function<double(double t, std::span<const double> z)> reference_density;
};

/// Throws ModelError naming the first violated invariant.
void validate_model(const LevyModel& model);

/// Small-jump functionals. Scalars are computed eagerly; kappa/gamma evaluations
/// are memoised behind a mutex.
class SmallJumpFunctionals {
public:
    explicit SmallJumpFunctionals(const LevyModel& model);

    double kappa(double delta) const;
    double zeta(double delta) const { return delta * kappa(delta); }
    double gamma(double delta) const;
    double chi(double delta) const;

    double total_mass() const { return total_mass_; }
    double kappa0() const { return kappa0_; }
    double dtail() const { return dtail_; }
    double sigma2_min() const { return sigma2_min_; }
    double sigma2_sum() const { return sigma2_sum_; }

private:
    LevyModel model_;
    double total_mass_ = 0.0;
    double kappa0_ = 0.0;
    double dtail_ = 0.0;
    double sigma2_min_ = 0.0;
    double sigma2_sum_ = 0.0;
    mutable std::mutex cache_mutex_;
    mutable std::map<double, double> kappa_cache_;
};

/// Box [-1,1]^d \ [-delta,delta]^d as a disjoint union of slabs.
std::vector<Box> annulus_boxes(int dim, double delta);

/// Characteristic exponent Psi(p).
Complex psi(const LevyModel& model, std::span<const double> p);
Complex psi(const LevyModel& model, double p);

/// Log moment generating function Psi(-iu) for real u (finite only when the
/// exponential moment exists).
double log_mgf(const LevyModel& model, double u);

struct Coercivity {
    double P = 0.0;
    double C = 0.0;
    double epsilon = 2.0;
    // Same bound for the exact exponent: |exp(t Psi(p))| <= exp(-C_exact t |p|^eps)
    // for |p| >= P_exact.
    double P_exact = 0.0;
    double C_exact = 0.0;
};

/// Constants with |exp(t Psi^h(p))| <= exp(-C t |p|^eps) for |p| >= P, uniformly
/// in small h, plus the analogous constants for Psi. Throws NoDensityGuarantee
/// when neither diffusion nor Orey data is available.
Coercivity coercivity_constants(const LevyModel& model);

/// Orey quotient r^{eps-2} * integral over [-r,r]^d of |x|^2 at r = 2^-k.
std::vector<double> orey_quotients(const LevyModel& model, double epsilon, int kmin, int kmax);

}  // namespace levychain
