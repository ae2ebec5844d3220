#pragma once

#include "levychain/levy_model.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace levychain {

enum class SchemeKind { Scheme1, Scheme2, Multivariate };

std::string to_string(SchemeKind s);
SchemeKind scheme_from_string(const std::string& s);

/// Lattice h Z^d truncated to the sup-norm box |x|_inf <= M.
struct LatticeSpec {
    double h = 0.5;
    int dim = 1;
    double M = 5.0;
    double tail_cut = 1e-10;
};

/// Throws ModelError on h <= 0, M < h or tail_cut outside (0, 1e-3].
void validate_spec(const LatticeSpec& spec, const LevyModel& model);

using Index = std::array<int32_t, kMaxDim>;

struct JumpWeight {
    Index k{};
    double rate = 0.0;
};

/// Cell masses c_s = lambda(A_s) for s = k h != 0, out to the enumeration
/// radius, plus the variance and drift corrections.
struct CellWeights {
    double h = 0.0;
    int dim = 1;
    std::vector<JumpWeight> jumps;  // sorted by k, positive rates only
    std::vector<double> c0;         // diagonal variance corrections
    std::vector<double> mu_h;       // drift corrections
    double outside_mass = 0.0;      // lambda(R^d \ A_0)
    double remainder = 0.0;         // mass of cells beyond the enumeration radius
    int32_t radius = 0;             // enumeration radius in cells (sup norm)
    double captured() const;
};

/// Closure-aware cell interval of index k: [(k-1/2)h, (k+1/2)h) for k < 0,
/// closed for k = 0 and ((k-1/2)h, (k+1/2)h] for k > 0.
Interval cell_interval(int64_t k, double h);
Box cell_box(std::span<const int32_t> k, double h);
/// Index of the cell containing x (boundary points go to the cell nearer 0).
int64_t cell_index(double x, double h);

double cell_measure(const LevyMeasure& measure, std::span<const int32_t> k, double h);
double cell_measure(const LevyMeasure& measure, int32_t k, double h);

CellWeights build_weights(const LevyModel& model, const LatticeSpec& spec);

/// Per-coordinate drift discretisation: true where the centred difference is used.
std::vector<bool> two_sided_components(const LevyModel& model, SchemeKind scheme);

/// Largest h0 such that all off-diagonal generator entries are nonnegative for
/// every tested h < h0 (bisection to 1e-6 relative between grid points
/// 2^(1 - j/4)). +inf when the condition holds on the whole grid or is vacuous.
double h_star(const LevyModel& model, SchemeKind scheme);

/// Characteristic exponent of the lattice chain for fixed weights.
class DiscreteExponent {
public:
    DiscreteExponent(const LevyModel& model, CellWeights weights, SchemeKind scheme);

    Complex operator()(std::span<const double> p) const;
    Complex operator()(double p) const { return (*this)(std::span<const double>(&p, 1)); }

    const CellWeights& weights() const { return w_; }
    const std::vector<bool>& two_sided() const { return two_sided_; }
    /// mu_j - mu_j^h
    double drift_residual(int j) const { return residual_[j]; }
    /// Part of Psi^h that is not carried by the jump weights: diffusion and drift.
    Complex local_part(std::span<const double> p) const;

private:
    int dim_;
    CellWeights w_;
    std::vector<double> sigma2_;
    std::vector<double> residual_;
    std::vector<bool> two_sided_;
};

Complex psi_h(const LevyModel& model, const LatticeSpec& spec, SchemeKind scheme, double p);

struct PsiErrorParts {
    Complex sigma2_f;
    Complex mu_g;
    Complex l;
};

double f_h(double h, double p);
/// Scheme 1 drift error i (sin(hp)/h - p).
Complex g_h_centred(double h, double p);
/// Scheme 2 drift error, forward difference when residual > 0.
Complex g_h_one_sided(double h, double p, double residual);

/// Psi^h - Psi = sigma^2 f_h + mu g_h + l_h (d = 1).
PsiErrorParts psi_error_decomposition(const LevyModel& model, const DiscreteExponent& psih, double p);

}  // namespace levychain
